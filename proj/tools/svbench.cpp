// svbench: runs the desk-scale distributed statevector experiments, predicts
// time/energy for larger machines, calibrates the cost model, and sweeps
// configurations into CSVs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "svsim/cache_blocking.hpp"
#include "svsim/circuit.hpp"
#include "svsim/cost_model.hpp"
#include "svsim/emulator.hpp"
#include "svsim/errors.hpp"
#include "svsim/partition.hpp"
#include "svsim/statevector.hpp"

namespace {

using namespace svsim;

constexpr std::uint64_t kDefaultChunkCap = std::uint64_t{2} << 30;  // 2 GiB

struct CommonOpts {
  std::string experiment = "qft";
  int n_qubits = 0;
  int rank_bits = 0;
  std::uint64_t chunk_cap = kDefaultChunkCap;
  std::string mode = "blocking";
  std::string exchange = "full";
  int target = 0;
  int target2 = -1;
  int gate_count = 50;
  int swap_after = -1;
  std::string circuit_file;
  std::string config_file;
  std::string machine_file;
};

ScheduleMode parse_mode(const std::string& mode) {
  if (mode == "blocking") return ScheduleMode::Blocking;
  if (mode == "nonblocking") return ScheduleMode::Nonblocking;
  throw CLI::ValidationError("--mode", "expected blocking or nonblocking");
}

ExchangeMode parse_exchange(const std::string& exchange) {
  if (exchange == "full") return ExchangeMode::Full;
  if (exchange == "swap-halved" || exchange == "swap_halved")
    return ExchangeMode::SwapHalved;
  throw CLI::ValidationError("--exchange", "expected full or swap-halved");
}

Circuit build_experiment(const CommonOpts& opts, const PartitionPlan& plan) {
  if (opts.experiment == "qft") return build_qft(plan.n_qubits);
  if (opts.experiment == "qft-blocked") {
    std::optional<int> swap_after;
    if (opts.swap_after >= 0) swap_after = opts.swap_after;
    return block_qft(plan.n_qubits, plan.local_qubits, swap_after);
  }
  if (opts.experiment == "hbench")
    return build_hadamard_bench(opts.target, opts.gate_count, plan.n_qubits);
  if (opts.experiment == "swapbench") {
    if (opts.target2 < 0)
      throw CLI::ValidationError("--target2", "swapbench needs two targets");
    return build_swap_bench(opts.target, opts.target2, opts.gate_count,
                            plan.n_qubits);
  }
  if (opts.experiment == "custom-circuit") {
    if (opts.circuit_file.empty())
      throw CLI::ValidationError("--circuit", "custom-circuit needs a file");
    std::ifstream in(opts.circuit_file);
    if (!in)
      throw std::runtime_error("cannot open circuit file " + opts.circuit_file);
    std::stringstream buf;
    buf << in.rdbuf();
    Circuit c;
    try {
      c = parse_circuit(buf.str());
    } catch (const ParseError& e) {
      throw std::runtime_error(opts.circuit_file + ": " + e.what());
    }
    if (c.n_qubits != plan.n_qubits)
      throw std::runtime_error("circuit file is for " +
                               std::to_string(c.n_qubits) +
                               " qubits, plan expects " +
                               std::to_string(plan.n_qubits));
    return c;
  }
  throw CLI::ValidationError("--exp", "unknown experiment " + opts.experiment);
}

CostParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cost params file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return cost_params_from_json(buf.str());
}

MachineConfig load_machine(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open machine file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return machine_from_json(buf.str());
}

MachineConfig resolve_machine(const CommonOpts& opts, std::uint64_t fallback_nodes) {
  MachineConfig cfg;
  if (!opts.machine_file.empty())
    cfg = load_machine(opts.machine_file);
  else
    cfg.nodes = fallback_nodes;
  return cfg;
}

CostParams resolve_params(const CommonOpts& opts) {
  if (!opts.config_file.empty()) return load_params(opts.config_file);
  return default_cost_params();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_summary_csv(std::ostream& out, const CommonOpts& opts,
                       const PartitionPlan& plan, std::uint64_t seed, int reps,
                       std::size_t gate_count, const CommTrace& trace,
                       const std::string& verified, double max_infidelity,
                       const RunReport& prediction,
                       const std::vector<double>& wall_s) {
  out << "experiment,n_qubits,rank_bits,local_qubits,chunk_cap_bytes,mode,"
         "exchange,seed,repetitions,gate_count,distributed_gates,"
         "total_messages,total_bytes,verified,max_infidelity,"
         "predicted_runtime_s,predicted_node_energy_j,"
         "predicted_network_energy_j,predicted_total_energy_j,"
         "wall_s_min,wall_s_median\n";
  std::vector<double> sorted = wall_s;
  std::sort(sorted.begin(), sorted.end());
  const double wall_min = sorted.front();
  const double wall_median =
      sorted.size() % 2 == 1
          ? sorted[sorted.size() / 2]
          : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  out << opts.experiment << "," << plan.n_qubits << "," << plan.rank_bits << ","
      << plan.local_qubits << "," << plan.chunk_cap_bytes << "," << opts.mode
      << "," << opts.exchange << "," << seed << "," << reps << ","
      << gate_count << "," << trace.distributed_gate_count() << ","
      << trace.total_messages() << "," << trace.total_bytes() << ","
      << verified << ","
      << (verified == "skipped" ? "" : format_double(max_infidelity)) << ","
      << format_double(prediction.runtime_s) << ","
      << format_double(prediction.node_energy_j) << ","
      << format_double(prediction.network_energy_j) << ","
      << format_double(prediction.total_energy_j) << ","
      << format_double(wall_min) << "," << format_double(wall_median) << "\n";
}

int cmd_run(const CommonOpts& opts, std::uint64_t seed, int reps, int max_n,
            bool verify, double verify_tol, const std::string& out_dir,
            const std::string& dump_state) {
  if (opts.n_qubits > max_n) {
    const double gib = std::ldexp(16.0, opts.n_qubits) * 2.0 / (1 << 30);
    std::cerr << "refusing n=" << opts.n_qubits << ": the emulator needs about "
              << format_double(gib) << " GiB (statevector plus receive "
              << "buffers); raise --max-n if this machine can take it\n";
    return 1;
  }
  const PartitionPlan plan =
      make_plan(opts.n_qubits, opts.rank_bits, opts.chunk_cap);
  const Circuit circuit = build_experiment(opts, plan);
  const ScheduleMode mode = parse_mode(opts.mode);
  const ExchangeMode exchange = parse_exchange(opts.exchange);
  const std::uint64_t basis = seed & ((std::uint64_t{1} << plan.n_qubits) - 1);

  std::vector<double> wall_s;
  std::optional<DistributedResult> result;
  for (int rep = 0; rep < reps; ++rep) {
    const auto start = std::chrono::steady_clock::now();
    DistributedResult r = run_distributed(circuit, plan, mode, exchange, basis);
    const auto stop = std::chrono::steady_clock::now();
    wall_s.push_back(std::chrono::duration<double>(stop - start).count());
    if (!result) result = std::move(r);
  }

  std::string verified = "skipped";
  double max_infidelity = 0.0;
  if (verify && plan.n_qubits <= 14) {
    Statevector dense = init_basis_state(plan.n_qubits, basis);
    run_circuit(dense, circuit);
    max_infidelity = std::max(0.0, 1.0 - fidelity(result->state, dense));
    double max_dev = 0.0;
    for (std::uint64_t i = 0; i < dense.size(); ++i)
      max_dev = std::max(max_dev, std::abs(dense[i] - result->state[i]));
    verified = max_infidelity < verify_tol ? "yes" : "no";
    if (verified == "no")
      std::cerr << "verification FAILED: infidelity "
                << format_double(max_infidelity) << " (tolerance "
                << format_double(verify_tol) << "), max amplitude deviation "
                << format_double(max_dev) << "\n";
  } else if (verify) {
    std::cerr << "verification skipped: n > 14\n";
  }

  const CostParams params = resolve_params(opts);
  const MachineConfig machine = resolve_machine(opts, plan.ranks());
  const RunReport prediction =
      predict_circuit(circuit, plan, params, machine, mode);

  std::filesystem::create_directories(out_dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(out_dir) / name).string();
  };
  {
    std::ofstream trace_out(path("trace.jsonl"));
    result->trace.write_jsonl(trace_out);
  }
  {
    std::ofstream csv(path("summary.csv"));
    write_summary_csv(csv, opts, plan, seed, reps, circuit.gates.size(),
                      result->trace, verified, max_infidelity, prediction,
                      wall_s);
  }
  {
    nlohmann::json j;
    j["experiment"] = opts.experiment;
    j["plan"] = {{"n", plan.n_qubits},
                 {"r", plan.rank_bits},
                 {"m", plan.local_qubits},
                 {"chunk_cap", plan.chunk_cap_bytes}};
    j["mode"] = opts.mode;
    j["exchange"] = opts.exchange;
    j["seed"] = seed;
    j["initial_basis"] = basis;
    j["gate_count"] = circuit.gates.size();
    j["verified"] = verified;
    if (verified != "skipped") j["max_infidelity"] = max_infidelity;
    j["trace_totals"] = {{"distributed_gates",
                          result->trace.distributed_gate_count()},
                         {"messages", result->trace.total_messages()},
                         {"bytes", result->trace.total_bytes()}};
    j["prediction"] = {{"runtime_s", prediction.runtime_s},
                       {"node_energy_j", prediction.node_energy_j},
                       {"network_energy_j", prediction.network_energy_j},
                       {"total_energy_j", prediction.total_energy_j}};
    j["wall_s"] = wall_s;
    std::ofstream report(path("report.json"));
    report << j.dump(2) << "\n";
  }
  if (!dump_state.empty()) {
    std::ofstream out(dump_state, std::ios::binary);
    dump_raw(result->state, out);
  }

  std::cout << opts.experiment << ": n=" << plan.n_qubits
            << " r=" << plan.rank_bits << " m=" << plan.local_qubits
            << " mode=" << opts.mode << " exchange=" << opts.exchange << "\n"
            << "gates " << circuit.gates.size() << ", distributed "
            << result->trace.distributed_gate_count() << ", messages "
            << result->trace.total_messages() << ", bytes "
            << result->trace.total_bytes() << "\n";
  if (verified != "skipped")
    std::cout << "verify " << (verified == "yes" ? "PASS" : "FAIL")
              << " (infidelity " << format_double(max_infidelity) << ")\n";
  std::cout << "predicted runtime " << format_double(prediction.runtime_s)
            << " s, total energy " << format_double(prediction.total_energy_j)
            << " J\n"
            << "wrote " << path("trace.jsonl") << ", " << path("summary.csv")
            << ", " << path("report.json") << "\n";
  return verified == "no" ? 2 : 0;
}

int cmd_predict(const CommonOpts& opts, int rank_bits_flag,
                std::uint64_t nodes_flag, const std::string& out_dir) {
  if (opts.config_file.empty())
    throw CalibrationError(
        "predict needs calibrated cost parameters; run `svbench calibrate "
        "--records <csv> --out params.json` and pass --config params.json");
  const CostParams params = load_params(opts.config_file);

  MachineConfig machine;
  if (!opts.machine_file.empty()) machine = load_machine(opts.machine_file);
  if (nodes_flag > 0) machine.nodes = nodes_flag;

  int r = rank_bits_flag;
  if (r < 0) {
    std::uint64_t nodes = machine.nodes;
    if (opts.machine_file.empty() && nodes_flag == 0)
      nodes = min_nodes(opts.n_qubits, machine.node_mem_bytes);
    if ((nodes & (nodes - 1)) != 0)
      throw std::runtime_error("node count " + std::to_string(nodes) +
                               " is not a power of two; pass --r explicitly");
    r = static_cast<int>(std::log2(static_cast<double>(nodes)));
    machine.nodes = nodes;
  }

  const PartitionPlan plan = make_plan(opts.n_qubits, r, opts.chunk_cap);
  const Circuit circuit = build_experiment(opts, plan);
  const ScheduleMode mode = parse_mode(opts.mode);
  const RunReport report = predict_circuit(circuit, plan, params, machine, mode);
  const CommStats stats = comm_stats(circuit, plan);

  std::filesystem::create_directories(out_dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(out_dir) / name).string();
  };
  {
    std::ofstream json_out(path("report.json"));
    nlohmann::json j;
    j["experiment"] = opts.experiment;
    j["plan"] = {{"n", plan.n_qubits},
                 {"r", plan.rank_bits},
                 {"m", plan.local_qubits},
                 {"chunk_cap", plan.chunk_cap_bytes}};
    j["mode"] = opts.mode;
    j["machine"] = {{"nodes", machine.nodes},
                    {"frequency_ghz", machine.frequency_ghz},
                    {"switches", machine.switches()}};
    j["comm"] = {{"distributed_gates", stats.distributed_gates},
                 {"messages", stats.messages},
                 {"bytes", stats.bytes}};
    j["runtime_s"] = report.runtime_s;
    j["node_energy_j"] = report.node_energy_j;
    j["network_energy_j"] = report.network_energy_j;
    j["total_energy_j"] = report.total_energy_j;
    json_out << j.dump(2) << "\n";
  }
  {
    std::ofstream csv(path("report.csv"));
    write_report_csv(report, csv);
  }

  std::cout << opts.experiment << ": n=" << plan.n_qubits
            << " r=" << plan.rank_bits << " nodes=" << machine.nodes
            << " mode=" << opts.mode << "\n"
            << "distributed gates " << stats.distributed_gates << ", bytes "
            << stats.bytes << ", messages " << stats.messages << "\n"
            << "runtime " << format_double(report.runtime_s) << " s, node "
            << format_double(report.node_energy_j) << " J, network "
            << format_double(report.network_energy_j) << " J, total "
            << format_double(report.total_energy_j) << " J\n"
            << "wrote " << path("report.json") << ", " << path("report.csv")
            << "\n";
  return 0;
}

int cmd_calibrate(const std::string& records_file, const std::string& out_file,
                  const CalibrationOptions& options) {
  std::ifstream in(records_file);
  if (!in)
    throw std::runtime_error("cannot open records file " + records_file);
  const std::vector<CalRecord> records = parse_calibration_csv(in);
  const CalibrationResult result = calibrate(records, options);

  std::cout << "fitted " << records.size() << " records\n";
  std::cout << "t_amp_mem " << format_double(result.params.t_amp_mem)
            << " s, t_amp_compute "
            << format_double(result.params.t_amp_compute) << " s, alpha "
            << format_double(result.params.alpha) << " s, beta "
            << format_double(result.params.beta) << " s/B, kappa "
            << format_double(result.params.kappa)
            << (result.params.kappa_clamped ? " (clamped)" : "") << "\n";
  for (const auto& [freq, power] : result.params.node_power_watts)
    std::cout << "node power @" << format_double(freq) << " GHz: local "
              << format_double(power.local_w) << " W, distributed "
              << format_double(power.distributed_w) << " W\n";
  std::cout << "residuals (relative):\n";
  for (std::size_t i = 0; i < result.residuals.size(); ++i) {
    const CalResidual& res = result.residuals[i];
    std::cout << "  record " << i << ": time "
              << format_double(100.0 * res.rel_time_error) << "%, energy "
              << format_double(100.0 * res.rel_energy_error) << "%\n";
  }

  std::ofstream out(out_file);
  if (!out) throw std::runtime_error("cannot write params file " + out_file);
  out << cost_params_to_json(result.params) << "\n";
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

struct Range {
  int from = 0;
  int to = 0;
  bool is_range = false;
};

Range parse_range(const std::string& text, const char* flag) {
  Range range;
  const std::size_t dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      range.from = range.to = std::stoi(text);
    } else {
      range.from = std::stoi(text.substr(0, dots));
      range.to = std::stoi(text.substr(dots + 2));
      range.is_range = true;
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError(flag, "expected N or A..B");
  }
  if (range.to < range.from)
    throw CLI::ValidationError(flag, "empty range " + text);
  return range;
}

int cmd_sweep(const CommonOpts& opts, const std::string& n_spec,
              const std::string& r_spec, const std::string& out_file) {
  if (opts.experiment != "qft" && opts.experiment != "qft-blocked")
    throw CLI::ValidationError("--exp", "sweep supports qft and qft-blocked");
  const Range n_range = parse_range(n_spec, "--n");
  const Range r_range = parse_range(r_spec, "--r");
  if (n_range.is_range && r_range.is_range)
    throw CLI::ValidationError("--n/--r", "sweep one axis at a time");

  const CostParams params = resolve_params(opts);

  std::ostringstream csv;
  csv << "experiment,n_qubits,rank_bits,local_qubits,chunk_cap_bytes,"
         "gate_count,distributed_gates,total_messages,total_bytes,"
         "pred_runtime_blocking_s,pred_runtime_nonblocking_s,"
         "pred_total_energy_blocking_j,pred_total_energy_nonblocking_j\n";
  for (int n = n_range.from; n <= n_range.to; ++n) {
    for (int r = r_range.from; r <= r_range.to; ++r) {
      if (r >= n) continue;
      const PartitionPlan plan = make_plan(n, r, opts.chunk_cap);
      Circuit circuit = opts.experiment == "qft"
                            ? build_qft(n)
                            : block_qft(n, plan.local_qubits);
      const CommStats stats = comm_stats(circuit, plan);
      const MachineConfig machine = resolve_machine(opts, plan.ranks());
      const RunReport blocking = predict_circuit(circuit, plan, params, machine,
                                                 ScheduleMode::Blocking);
      const RunReport nonblocking = predict_circuit(
          circuit, plan, params, machine, ScheduleMode::Nonblocking);
      csv << opts.experiment << "," << n << "," << r << ","
          << plan.local_qubits << "," << plan.chunk_cap_bytes << ","
          << circuit.gates.size() << "," << stats.distributed_gates << ","
          << stats.messages << "," << stats.bytes << ","
          << format_double(blocking.runtime_s) << ","
          << format_double(nonblocking.runtime_s) << ","
          << format_double(blocking.total_energy_j) << ","
          << format_double(nonblocking.total_energy_j) << "\n";
    }
  }
  if (out_file.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_file);
    if (!out) throw std::runtime_error("cannot write " + out_file);
    out << csv.str();
    std::cout << "wrote " << out_file << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed statevector benchmark harness"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::uint64_t seed = 0;
  int reps = 1;
  int max_n = 26;
  bool verify = false;
  double verify_tol = 1e-10;
  std::string out_dir = ".";
  std::string dump_state;
  std::string records_file;
  std::string params_out = "params.json";
  std::string n_spec, r_spec, sweep_out;
  int predict_r = -1;
  std::uint64_t predict_nodes = 0;
  CalibrationOptions cal_options;

  const auto add_common = [&](CLI::App* cmd, bool need_n) {
    cmd->add_option("--exp", opts.experiment,
                    "qft | qft-blocked | hbench | swapbench | custom-circuit");
    if (need_n) cmd->add_option("--n", opts.n_qubits, "register size")->required();
    cmd->add_option("--chunk-cap", opts.chunk_cap, "message cap in bytes");
    cmd->add_option("--mode", opts.mode, "blocking | nonblocking");
    cmd->add_option("--target", opts.target, "bench target qubit");
    cmd->add_option("--target2", opts.target2, "second swapbench qubit");
    cmd->add_option("--gates", opts.gate_count, "bench gate count");
    cmd->add_option("--swap-after", opts.swap_after,
                    "Hadamards before the swap block (qft-blocked)");
    cmd->add_option("--circuit", opts.circuit_file, "circuit file");
    cmd->add_option("--config", opts.config_file, "cost params JSON");
    cmd->add_option("--machine", opts.machine_file, "machine config JSON");
  };

  CLI::App* run = app.add_subcommand("run", "emulate a circuit and trace it");
  add_common(run, true);
  run->add_option("--r", opts.rank_bits, "rank bits (2^r ranks)")->required();
  run->add_option("--exchange", opts.exchange, "full | swap-halved");
  run->add_option("--seed", seed, "selects the initial basis state");
  run->add_option("--reps", reps, "emulator repetitions for wall stats")
      ->check(CLI::PositiveNumber);
  run->add_option("--max-n", max_n, "desk-scale register cap");
  run->add_flag("--verify", verify, "check against the dense engine (n <= 14)");
  run->add_option("--verify-tol", verify_tol, "infidelity tolerance");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--dump-state", dump_state, "raw amplitude dump path");

  CLI::App* predict = app.add_subcommand("predict", "cost model only, any size");
  add_common(predict, true);
  predict->add_option("--r", predict_r, "rank bits; default from node count");
  predict->add_option("--nodes", predict_nodes, "override machine node count");
  predict->add_option("--out", out_dir, "output directory");

  CLI::App* calib = app.add_subcommand("calibrate", "fit cost params from CSV");
  calib->add_option("--records", records_file, "calibration CSV")->required();
  calib->add_option("--out", params_out, "params JSON output path");
  calib->add_option("--switch-ratio", cal_options.switch_ratio, "nodes per switch");
  calib->add_option("--switch-power", cal_options.switch_power_watts,
                    "switch power in watts");
  calib->add_option("--compute-fraction", cal_options.compute_fraction,
                    "compute share of local gate time");
  calib->add_option("--f-ref", cal_options.f_ref_ghz, "reference clock in GHz");

  CLI::App* sweep = app.add_subcommand("sweep", "CSV over n or r");
  add_common(sweep, false);
  sweep->add_option("--n", n_spec, "N or A..B")->required();
  sweep->add_option("--r", r_spec, "N or A..B")->required();
  sweep->add_option("--out", sweep_out, "CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
    if (run->parsed())
      return cmd_run(opts, seed, reps, max_n, verify, verify_tol, out_dir,
                     dump_state);
    if (predict->parsed())
      return cmd_predict(opts, predict_r, predict_nodes, out_dir);
    if (calib->parsed())
      return cmd_calibrate(records_file, params_out, cal_options);
    if (sweep->parsed()) return cmd_sweep(opts, n_spec, r_spec, sweep_out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const svsim::CalibrationError& e) {
    std::cerr << "calibration error: " << e.what() << "\n";
    return 3;
  } catch (const svsim::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
