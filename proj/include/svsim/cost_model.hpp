#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "svsim/circuit.hpp"
#include "svsim/partition.hpp"

namespace svsim {

/// Average node power draw in watts, split by what the node spends its
/// time on: local gate work vs. waiting on exchanges. Both are fitted from
/// measured per-gate energies.
struct NodePower {
  double local_w = 0.0;
  double distributed_w = 0.0;
};

/// Calibrated coefficients of the additive time model. Local gate time is
/// amps_touched * (t_amp_mem + t_amp_compute * scale(f)) with
/// scale(f) = compute_fraction * (f_ref/f) + (1 - compute_fraction);
/// only the compute term feels the clock. Exchange time is
/// chunks * alpha + bytes * beta per rank (blocking), or
/// alpha + bytes * beta / kappa when chunks overlap (nonblocking).
struct CostParams {
  double t_amp_compute = 0.0;  // s per amplitude at f_ref
  double t_amp_mem = 0.0;      // s per amplitude
  double alpha = 0.0;          // s per message
  double beta = 0.0;           // s per byte
  double kappa = 1.0;          // nonblocking overlap factor, >= 1
  double f_ref_ghz = 2.0;
  double compute_fraction = 1.0 / 3.0;
  bool kappa_clamped = false;  // set when calibration clamped kappa to 1

  /// Fitted per-frequency node powers; consulted when the machine config
  /// does not carry its own.
  std::map<double, NodePower> node_power_watts;
};

struct MachineConfig {
  std::uint64_t nodes = 64;
  std::uint64_t node_mem_bytes = std::uint64_t{256} << 30;
  std::uint64_t switch_ratio = 8;  // nodes per switch
  double switch_power_watts = 235.0;
  double frequency_ghz = 2.0;
  std::map<double, NodePower> node_power_watts;

  std::uint64_t switches() const {
    return (nodes + switch_ratio - 1) / switch_ratio;
  }
};

/// Estimated network energy: switches * average switch power * runtime.
double energy_network(std::uint64_t nodes, double dt_seconds,
                      const MachineConfig& cfg);

/// Smallest power-of-two node count that fits an n-qubit statevector,
/// one rank per node. A single node needs no exchange buffer; multi-node
/// runs double the footprint, and a node is considered full at exactly
/// its memory size.
std::uint64_t min_nodes(int n_qubits, std::uint64_t node_mem_bytes);

struct GateCost {
  std::size_t gate_index = 0;
  GateKind kind = GateKind::Hadamard;
  GateLocality locality = GateLocality::FullyLocal;
  double seconds = 0.0;           // per-gate wall time (critical rank)
  double exchange_seconds = 0.0;  // portion spent in messages
  double node_energy_j = 0.0;
  std::uint64_t bytes = 0;     // summed over ranks; matches CommTrace
  std::uint64_t messages = 0;  // summed over ranks; matches CommTrace
};

struct RunReport {
  double runtime_s = 0.0;
  double node_energy_j = 0.0;
  double network_energy_j = 0.0;
  double total_energy_j = 0.0;
  std::vector<GateCost> per_gate;
};

double predict_gate_time(const Gate& gate, const PartitionPlan& plan,
                         const CostParams& params, const MachineConfig& cfg,
                         ScheduleMode mode);

/// Full per-gate cost including energy and traced byte/message totals.
GateCost predict_gate(std::size_t gate_index, const Gate& gate,
                      const PartitionPlan& plan, const CostParams& params,
                      const MachineConfig& cfg, ScheduleMode mode);

RunReport predict_circuit(const Circuit& circuit, const PartitionPlan& plan,
                          const CostParams& params, const MachineConfig& cfg,
                          ScheduleMode mode);

/// One measured row of a calibration corpus. `locality` distinguishes
/// local-memory gates from distributed ones; fully-local rows are treated
/// as local memory.
struct CalRecord {
  GateLocality locality = GateLocality::LocalMemory;
  ScheduleMode mode = ScheduleMode::Blocking;
  PartitionPlan plan;
  std::uint64_t nodes = 0;
  double frequency_ghz = 2.0;
  double seconds = 0.0;
  double joules = 0.0;
};

struct CalResidual {
  double predicted_s = 0.0;
  double measured_s = 0.0;
  double predicted_j = 0.0;
  double measured_j = 0.0;
  double rel_time_error = 0.0;
  double rel_energy_error = 0.0;
};

struct CalibrationOptions {
  std::uint64_t switch_ratio = 8;
  double switch_power_watts = 235.0;
  double compute_fraction = 1.0 / 3.0;
  double f_ref_ghz = 2.0;
};

struct CalibrationResult {
  CostParams params;
  std::vector<CalResidual> residuals;
};

/// Least-squares fit: the per-amplitude time from local records, alpha and
/// beta from blocking distributed records (alpha pinned to zero when a
/// single record leaves it unidentifiable), kappa from nonblocking
/// distributed records (clamped to >= 1 with a warning flag), and
/// per-class node powers from the energies after subtracting the network
/// estimate. Throws CalibrationError when a gate class is missing.
CalibrationResult calibrate(const std::vector<CalRecord>& records,
                            const CalibrationOptions& options = {});

/// The built-in sample corpus: per-gate times and energies of a Hadamard
/// benchmark on qubits 29 and 32 of a 38-qubit register on 64 nodes
/// (2 GiB message cap), in both schedule modes. data/table1_hbench.csv
/// carries the same rows.
std::vector<CalRecord> sample_hadamard_corpus();

/// Params fitted from sample_hadamard_corpus(); used by the CLI when no
/// calibration file is given.
CostParams default_cost_params();

// Calibration corpus CSV:
//   class,mode,n_qubits,rank_bits,chunk_cap_bytes,nodes,frequency_ghz,time_s,energy_j
// with '#' comments and blank lines ignored.
std::vector<CalRecord> parse_calibration_csv(std::istream& in);

std::string cost_params_to_json(const CostParams& params);
CostParams cost_params_from_json(const std::string& text);
std::string machine_to_json(const MachineConfig& cfg);
MachineConfig machine_from_json(const std::string& text);

void write_report_json(const RunReport& report, std::ostream& out);
/// One row per gate plus a trailing total row.
void write_report_csv(const RunReport& report, std::ostream& out);

}  // namespace svsim
