// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "svsim/cache_blocking.hpp"
#include "svsim/circuit.hpp"
#include "svsim/cost_model.hpp"
#include "svsim/emulator.hpp"
#include "svsim/partition.hpp"
#include "svsim/statevector.hpp"

using namespace svsim;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double max_deviation(const Statevector& a, const Statevector& b) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

Circuit random_circuit(std::mt19937_64& rng, int n, int gates) {
  Circuit c(n);
  std::uniform_int_distribution<int> qubit(0, n - 1);
  std::uniform_int_distribution<int> kind(0, n >= 2 ? 2 : 0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int i = 0; i < gates; ++i) {
    const int k = kind(rng);
    if (k == 0) {
      c.push(Gate::hadamard(qubit(rng)));
    } else {
      int a = qubit(rng), b = qubit(rng);
      while (b == a) b = qubit(rng);
      c.push(k == 1 ? Gate::controlled_phase(a, b, angle(rng))
                    : Gate::swap(a, b));
    }
  }
  return c;
}

// 1. Gate-built QFT against the direct DFT oracle, every basis input,
//    infidelity < 1e-10, under two minutes.
Outcome criterion_qft_oracle() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::uint64_t states = 0;
  for (int n = 1; n <= 12; ++n) {
    const Circuit qft = build_qft(n);
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
      Statevector s = init_basis_state(n, x);
      run_circuit(s, qft);
      worst = std::max(worst, 1.0 - fidelity(s, qft_oracle(n, x)));
      ++states;
    }
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  Outcome out;
  out.pass = worst < 1e-10 && elapsed < 120.0;
  out.detail = fmt("worst infidelity %.2e over %llu basis states, %.1f s",
                   worst, (unsigned long long)states, elapsed);
  return out;
}

// 2. Emulator against the dense engine: n <= 14, r in 0..4, 50 random
//    circuits per pair, all four mode/exchange combinations, < 1e-13.
Outcome criterion_distributed_equals_dense() {
  const ScheduleMode modes[] = {ScheduleMode::Blocking,
                                ScheduleMode::Nonblocking};
  const ExchangeMode exchanges[] = {ExchangeMode::Full,
                                    ExchangeMode::SwapHalved};
  double worst = 0.0;
  std::uint64_t runs = 0;
  for (int n = 1; n <= 14; ++n) {
    for (int r = 0; r <= 4 && r < n; ++r) {
      std::mt19937_64 rng(1000 * n + r);
      const PartitionPlan plan =
          make_plan(n, r, 48 + (rng() % 4096));  // uneven caps chunk oddly
      for (int trial = 0; trial < 50; ++trial) {
        const Circuit c = random_circuit(rng, n, 20);
        const std::uint64_t basis = rng() & ((std::uint64_t{1} << n) - 1);
        Statevector dense = init_basis_state(n, basis);
        run_circuit(dense, c);
        for (ScheduleMode mode : modes)
          for (ExchangeMode exchange : exchanges) {
            auto res = run_distributed(c, plan, mode, exchange, basis);
            worst = std::max(worst, max_deviation(res.state, dense));
            ++runs;
          }
      }
    }
  }
  Outcome out;
  out.pass = worst < 1e-13;
  out.detail = fmt("max amplitude deviation %.2e over %llu runs", worst,
                   (unsigned long long)runs);
  return out;
}

// 3. Blocked QFT halves both the distributed gate count and the traced
//    bytes for every plan with 2 <= 2r <= n <= 20; the static analysis and
//    the dynamic trace agree byte for byte.
Outcome criterion_halving() {
  Outcome out;
  std::uint64_t configs = 0;
  for (int n = 2; n <= 20; ++n) {
    for (int r = 1; 2 * r <= n; ++r) {
      const PartitionPlan plan = make_plan(n, r, std::uint64_t{1} << 20);
      const Circuit standard = build_qft(n);
      const Circuit blocked = block_qft(n, plan.local_qubits);

      const CommStats s_static = comm_stats(standard, plan);
      const CommStats b_static = comm_stats(blocked, plan);
      const auto s_run = run_distributed(standard, plan);
      const auto b_run = run_distributed(blocked, plan);

      const bool agree =
          s_static.bytes == s_run.trace.total_bytes() &&
          s_static.messages == s_run.trace.total_messages() &&
          s_static.distributed_gates == s_run.trace.distributed_gate_count() &&
          b_static.bytes == b_run.trace.total_bytes() &&
          b_static.messages == b_run.trace.total_messages() &&
          b_static.distributed_gates == b_run.trace.distributed_gate_count();
      const bool halved =
          s_static.distributed_gates == 2 * b_static.distributed_gates &&
          s_static.bytes == 2 * b_static.bytes;
      if (!agree || !halved) {
        out.pass = false;
        out.detail = fmt("failed at n=%d r=%d (agree=%d halved=%d)", n, r,
                         agree, halved);
        return out;
      }
      ++configs;
    }
  }
  out.detail = fmt("%llu (n, r) configurations, static == dynamic, ratio 2",
                   (unsigned long long)configs);
  return out;
}

// 4. Chunking: the 38-qubit, 64-rank, 2 GiB plan exchanges exactly 32
//    messages; random plans obey ceil(2^m * 16 / cap).
Outcome criterion_chunking() {
  Outcome out;
  const PartitionPlan archer = make_plan(38, 6, std::uint64_t{2} << 30);
  if (archer.messages_per_exchange() != 32) {
    out.pass = false;
    out.detail = fmt("38-qubit plan reports %llu messages, wanted 32",
                     (unsigned long long)archer.messages_per_exchange());
    return out;
  }
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 39);
    const int r = static_cast<int>(rng() % n);
    const std::uint64_t cap = 1 + rng() % (std::uint64_t{1} << 22);
    const PartitionPlan plan = make_plan(n, r, cap);
    const std::uint64_t bytes = plan.local_bytes();
    const std::uint64_t expect = bytes / cap + (bytes % cap ? 1 : 0);
    if (plan.messages_per_exchange() != expect) {
      out.pass = false;
      out.detail = fmt("ceil mismatch at m=%d cap=%llu", plan.local_qubits,
                       (unsigned long long)cap);
      return out;
    }
  }
  out.detail = "38-qubit plan: 32 messages; ceiling holds on 1000 random plans";
  return out;
}

// 5. swap_halved moves exactly half the bytes of full mode and leaves the
//    state unchanged, swept across n <= 14.
Outcome criterion_swap_halved() {
  Outcome out;
  double worst = 0.0;
  std::uint64_t checked = 0;
  for (int n = 3; n <= 14; ++n) {
    for (int r = 1; r <= 4 && r < n; ++r) {
      const PartitionPlan plan = make_plan(n, r, 56);
      const int m = plan.local_qubits;
      std::vector<Circuit> circuits;
      {
        Circuit c(n);  // lone mixed swap on a superposed state
        c.push(Gate::hadamard(0));
        c.push(Gate::swap(0, n - 1));
        c.push(Gate::swap(m - 1, m));
        circuits.push_back(c);
      }
      if (2 * r <= n) circuits.push_back(block_qft(n, m));

      for (const Circuit& c : circuits) {
        const auto full = run_distributed(c, plan, ScheduleMode::Blocking,
                                          ExchangeMode::Full, 1);
        const auto half = run_distributed(c, plan, ScheduleMode::Blocking,
                                          ExchangeMode::SwapHalved, 1);
        Statevector dense = init_basis_state(n, 1);
        run_circuit(dense, c);
        worst = std::max(worst, max_deviation(half.state, dense));
        worst = std::max(worst, max_deviation(half.state, full.state));
        for (std::size_t i = 0; i < c.gates.size(); ++i) {
          const auto& f = full.trace.gates[i];
          const auto& h = half.trace.gates[i];
          const bool mixed_swap =
              f.kind == GateKind::Swap &&
              f.locality == GateLocality::Distributed &&
              std::min(c.gates[i].target, c.gates[i].second) < m;
          const std::uint64_t want = mixed_swap ? f.bytes / 2 : f.bytes;
          if (h.bytes != want || (mixed_swap && 2 * h.bytes != f.bytes)) {
            out.pass = false;
            out.detail = fmt("byte mismatch at n=%d r=%d gate %zu", n, r, i);
            return out;
          }
          if (mixed_swap) ++checked;
        }
      }
    }
  }
  out.pass = out.pass && worst < 1e-13;
  out.detail = fmt("%llu halved swaps, worst state deviation %.2e",
                   (unsigned long long)checked, worst);
  return out;
}

// 6. Network energy formula, exact arithmetic and linearity.
Outcome criterion_energy_network() {
  Outcome out;
  MachineConfig cfg;  // 1 switch per 8 nodes, 235 W
  const double sample = energy_network(64, 0.51, cfg);
  const bool exact = sample == 8.0 * 235.0 * 0.51 &&
                     std::abs(sample - 958.8) <= 958.8 * 1e-15 &&
                     energy_network(64, 0.0, cfg) == 0.0 &&
                     energy_network(4096, 285.0, cfg) == 34291200.0;
  bool linear = true;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> dt(0.0, 1e5);
  for (int i = 0; i < 500 && linear; ++i) {
    const std::uint64_t nodes = 1 + rng() % (1 << 16);
    const double t = dt(rng);
    const double one = energy_network(nodes, t, cfg);
    const std::uint64_t switches = (nodes + 7) / 8;
    linear = std::abs(one - static_cast<double>(switches) * 235.0 * t) <=
                 1e-9 * std::max(1.0, one) &&
             std::abs(energy_network(nodes, 2.0 * t, cfg) - 2.0 * one) <=
                 1e-9 * std::max(1.0, one);
  }
  out.pass = exact && linear;
  out.detail = fmt("64 nodes x 0.51 s -> %.10g J; linearity on 500 samples",
                   sample);
  return out;
}

// 7. Calibration residuals: the shipped corpus fits within 5%; a noiseless
//    synthetic corpus round-trips within 1%.
Outcome criterion_calibration() {
  Outcome out;

  std::ifstream csv(std::string(SVSIM_DATA_DIR) + "/table1_hbench.csv");
  if (!csv) {
    out.pass = false;
    out.detail = "missing data/table1_hbench.csv";
    return out;
  }
  const auto corpus = parse_calibration_csv(csv);
  const CalibrationResult fit = calibrate(corpus);
  double worst_corpus = 0.0;
  for (const CalResidual& r : fit.residuals) {
    worst_corpus = std::max(worst_corpus, std::abs(r.rel_time_error));
    worst_corpus = std::max(worst_corpus, std::abs(r.rel_energy_error));
  }

  CostParams truth;
  truth.t_amp_compute = 4.1e-11;
  truth.t_amp_mem = 8.3e-11;
  truth.alpha = 3.0e-4;
  truth.beta = 1.25e-10;
  truth.kappa = 1.35;
  truth.node_power_watts[2.0] = NodePower{410.0, 275.0};
  MachineConfig cfg;
  cfg.node_power_watts = truth.node_power_watts;
  std::vector<CalRecord> synthetic;
  for (std::uint64_t cap : {std::uint64_t{1} << 31, std::uint64_t{1} << 27}) {
    for (int n : {34, 37}) {
      const PartitionPlan plan = make_plan(n, 5, cap);
      cfg.nodes = plan.ranks();
      CalRecord local{GateLocality::LocalMemory, ScheduleMode::Blocking, plan,
                      plan.ranks(), 2.0, 0.0, 0.0};
      local.seconds = predict_gate_time(Gate::hadamard(0), plan, truth, cfg,
                                        ScheduleMode::Blocking);
      local.joules = static_cast<double>(plan.ranks()) * 410.0 * local.seconds +
                     energy_network(plan.ranks(), local.seconds, cfg);
      synthetic.push_back(local);
      for (ScheduleMode mode :
           {ScheduleMode::Blocking, ScheduleMode::Nonblocking}) {
        CalRecord dist{GateLocality::Distributed, mode, plan, plan.ranks(),
                       2.0, 0.0, 0.0};
        dist.seconds =
            predict_gate_time(Gate::hadamard(n - 1), plan, truth, cfg, mode);
        dist.joules = static_cast<double>(plan.ranks()) * 275.0 * dist.seconds +
                      energy_network(plan.ranks(), dist.seconds, cfg);
        synthetic.push_back(dist);
      }
    }
  }
  const CalibrationResult synth_fit = calibrate(synthetic);
  double worst_synth = 0.0;
  for (const CalResidual& r : synth_fit.residuals) {
    worst_synth = std::max(worst_synth, std::abs(r.rel_time_error));
    worst_synth = std::max(worst_synth, std::abs(r.rel_energy_error));
  }
  const double tau_truth = truth.t_amp_compute + truth.t_amp_mem;
  const double tau_fit =
      synth_fit.params.t_amp_compute + synth_fit.params.t_amp_mem;
  const bool recovered =
      std::abs(tau_fit - tau_truth) <= 0.01 * tau_truth &&
      std::abs(synth_fit.params.alpha - truth.alpha) <= 0.01 * truth.alpha &&
      std::abs(synth_fit.params.beta - truth.beta) <= 0.01 * truth.beta &&
      std::abs(synth_fit.params.kappa - truth.kappa) <= 0.01 * truth.kappa;

  out.pass = worst_corpus < 0.05 && worst_synth < 0.01 && recovered;
  out.detail = fmt("corpus residual %.2f%%, synthetic residual %.3f%%",
                   100.0 * worst_corpus, 100.0 * worst_synth);
  return out;
}

// 8. Calibrated model consistency with the large published runs: the
//    sped-up 44-qubit configuration on 4096 nodes lands in [0.45, 0.75] of
//    the baseline runtime (a sanity band, not a measurement).
Outcome criterion_large_run_band() {
  const CostParams params = default_cost_params();
  MachineConfig cfg;
  cfg.nodes = 4096;
  const PartitionPlan plan = make_plan(44, 12, std::uint64_t{2} << 30);
  const RunReport standard = predict_circuit(build_qft(44), plan, params, cfg,
                                             ScheduleMode::Blocking);
  const RunReport fast =
      predict_circuit(block_qft(44, plan.local_qubits), plan, params, cfg,
                      ScheduleMode::Nonblocking);
  const double ratio = fast.runtime_s / standard.runtime_s;
  Outcome out;
  out.pass = ratio > 0.45 && ratio < 0.75;
  out.detail = fmt("predicted %.0f s / %.0f s = %.3f", fast.runtime_s,
                   standard.runtime_s, ratio);
  return out;
}

// 9. Gate-count formulas: n(n+1)/2 + floor(n/2) gates for n in 1..64;
//    2r distributed gates standard vs r blocked for r <= floor(n/2).
Outcome criterion_gate_counts() {
  Outcome out;
  for (int n = 1; n <= 64; ++n) {
    const Circuit qft = build_qft(n);
    const std::size_t expect =
        static_cast<std::size_t>(n) * (n + 1) / 2 + n / 2;
    if (qft.gates.size() != expect) {
      out.pass = false;
      out.detail = fmt("build_qft(%d) emitted %zu gates, wanted %zu", n,
                       qft.gates.size(), expect);
      return out;
    }
  }
  for (int n = 2; n <= 24; ++n) {
    for (int r = 1; 2 * r <= n; ++r) {
      const PartitionPlan plan = make_plan(n, r, std::uint64_t{1} << 21);
      const std::uint64_t std_dist =
          comm_stats(build_qft(n), plan).distributed_gates;
      const std::uint64_t blk_dist =
          comm_stats(block_qft(n, plan.local_qubits), plan).distributed_gates;
      if (std_dist != 2 * static_cast<std::uint64_t>(r) ||
          blk_dist != static_cast<std::uint64_t>(r)) {
        out.pass = false;
        out.detail = fmt("distributed counts off at n=%d r=%d (%llu, %llu)", n,
                         r, (unsigned long long)std_dist,
                         (unsigned long long)blk_dist);
        return out;
      }
    }
  }
  out.detail = "count formula n=1..64; 2r vs r distributed gates to n=24";
  return out;
}

// 10. Norm preservation: 200 random circuits, norm drift < 1e-12 after
//     every gate.
Outcome criterion_norm() {
  std::mt19937_64 rng(10);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const int gates = 1 + static_cast<int>(rng() % 100);
    const Circuit c = random_circuit(rng, n, gates);
    Statevector s = init_basis_state(n, rng() & ((std::uint64_t{1} << n) - 1));
    for (const Gate& g : c.gates) {
      apply_gate(s, g);
      worst = std::max(worst, std::abs(norm(s) - 1.0));
    }
  }
  Outcome out;
  out.pass = worst < 1e-12;
  out.detail = fmt("200 circuits, worst norm drift %.2e", worst);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"QFT oracle equivalence", criterion_qft_oracle},
      {"distributed == dense", criterion_distributed_equals_dense},
      {"communication halving", criterion_halving},
      {"chunking rule", criterion_chunking},
      {"swap_halved mode", criterion_swap_halved},
      {"network energy formula", criterion_energy_network},
      {"calibration residuals", criterion_calibration},
      {"large-run consistency band", criterion_large_run_band},
      {"gate-count formulas", criterion_gate_counts},
      {"norm preservation", criterion_norm},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %2zu. %s (%s)\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
