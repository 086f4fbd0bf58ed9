#include "svsim/cache_blocking.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "svsim/statevector.hpp"

namespace svsim {

QubitPermutation QubitPermutation::identity(int n) {
  QubitPermutation p;
  p.mapping.resize(n);
  for (int i = 0; i < n; ++i) p.mapping[i] = i;
  return p;
}

QubitPermutation QubitPermutation::bit_reversal(int n) {
  QubitPermutation p;
  p.mapping.resize(n);
  for (int i = 0; i < n; ++i) p.mapping[i] = n - 1 - i;
  return p;
}

bool QubitPermutation::is_bijection() const {
  std::vector<bool> seen(mapping.size(), false);
  for (int q : mapping) {
    if (q < 0 || q >= static_cast<int>(mapping.size()) || seen[q]) return false;
    seen[q] = true;
  }
  return true;
}

Gate QubitPermutation::apply(const Gate& gate) const {
  switch (gate.kind) {
    case GateKind::Hadamard:
      return Gate::hadamard((*this)(gate.target));
    case GateKind::ControlledPhase:
      return Gate::controlled_phase((*this)(gate.control), (*this)(gate.target),
                                    gate.angle);
    case GateKind::Swap:
      return Gate::swap((*this)(gate.target), (*this)(gate.second));
  }
  return gate;
}

namespace {

void push_rotations_then_h(Circuit& c, int t, const QubitPermutation& perm) {
  for (int k = 0; k < t; ++k)
    c.push(perm.apply(Gate::controlled_phase(k, t, M_PI / std::exp2(t - k))));
  c.push(perm.apply(Gate::hadamard(t)));
}

}  // namespace

Circuit block_qft(int n, int m, std::optional<int> swap_after) {
  if (n < 1) throw std::invalid_argument("block_qft: register size must be >= 1");
  if (m < 1) throw std::invalid_argument("block_qft: local qubit count must be >= 1");
  if (n <= m) return build_qft(n);  // every qubit already local

  const int r = n - m;
  if (r > m)
    throw std::invalid_argument(
        "block_qft: " + std::to_string(m) + " local qubits cannot localize a " +
        std::to_string(n) + "-qubit QFT (need n - m <= m)");
  const int j = swap_after.value_or(m);
  if (j < r || j > m)
    throw std::invalid_argument("block_qft: swap_after must lie in [" +
                                std::to_string(r) + ", " + std::to_string(m) +
                                "], got " + std::to_string(j));

  Circuit c(n);
  c.gates.reserve(static_cast<std::size_t>(n) * (n + 1) / 2 + n / 2);
  const auto id = QubitPermutation::identity(n);
  const auto flip = QubitPermutation::bit_reversal(n);
  for (int t = 0; t < j; ++t) push_rotations_then_h(c, t, id);
  for (int i = 0; i < n / 2; ++i) c.push(Gate::swap(i, n - 1 - i));
  for (int t = j; t < n; ++t) push_rotations_then_h(c, t, flip);
  return c;
}

Circuit conjugate_by_bit_reversal(const Circuit& circuit) {
  Circuit out(circuit.n_qubits);
  const int n = circuit.n_qubits;
  out.gates.reserve(circuit.gates.size() + 2 * (n / 2));
  for (int i = 0; i < n / 2; ++i) out.push(Gate::swap(i, n - 1 - i));
  for (const Gate& g : circuit.gates) out.push(g);
  for (int i = 0; i < n / 2; ++i) out.push(Gate::swap(i, n - 1 - i));
  return out;
}

CommStats comm_stats(const Circuit& circuit, const PartitionPlan& plan) {
  if (circuit.n_qubits != plan.n_qubits)
    throw std::invalid_argument("comm_stats: circuit does not match plan");
  CommStats stats;
  for (const Gate& g : circuit.gates) {
    if (classify(g, plan) != GateLocality::Distributed) continue;
    const rank_t participants = participating_ranks(g, plan);
    stats.distributed_gates += 1;
    stats.bytes += participants * plan.local_bytes();
    stats.messages += participants * plan.messages_per_exchange();
  }
  return stats;
}

std::string comm_stats_json(const CommStats& stats, const PartitionPlan& plan) {
  std::ostringstream out;
  out << "{\"distributed_gates\":" << stats.distributed_gates
      << ",\"bytes\":" << stats.bytes << ",\"messages\":" << stats.messages
      << ",\"plan\":{\"n\":" << plan.n_qubits << ",\"r\":" << plan.rank_bits
      << ",\"m\":" << plan.local_qubits
      << ",\"chunk_cap\":" << plan.chunk_cap_bytes << "}}";
  return out.str();
}

EquivalenceReport verify_equivalence(const Circuit& a, const Circuit& b,
                                     std::uint64_t trials, double tolerance) {
  if (a.n_qubits != b.n_qubits)
    throw std::invalid_argument("verify_equivalence: register sizes differ");
  const int n = a.n_qubits;
  const std::uint64_t dim = std::uint64_t{1} << n;
  const bool exhaustive = n <= 14 && (trials == 0 || trials >= dim);

  EquivalenceReport report;
  auto compare = [&](const Statevector& input) {
    Statevector sa = input;
    Statevector sb = input;
    run_circuit(sa, a);
    run_circuit(sb, b);
    report.max_infidelity =
        std::max(report.max_infidelity, 1.0 - fidelity(sa, sb));
  };

  if (exhaustive) {
    for (std::uint64_t x = 0; x < dim; ++x) compare(init_basis_state(n, x));
  } else {
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::uint64_t count = trials == 0 ? 20 : trials;
    for (std::uint64_t t = 0; t < count; ++t) {
      Statevector state(n);
      for (amp_t& amp : state.amps()) amp = amp_t{gauss(rng), gauss(rng)};
      const double scale = 1.0 / norm(state);
      for (amp_t& amp : state.amps()) amp *= scale;
      compare(state);
    }
  }
  report.pass = report.max_infidelity < tolerance;
  return report;
}

}  // namespace svsim
