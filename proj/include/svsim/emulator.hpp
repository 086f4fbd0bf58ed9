#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "svsim/circuit.hpp"
#include "svsim/partition.hpp"
#include "svsim/statevector.hpp"

namespace svsim {

struct MessageRecord {
  rank_t src = 0;
  rank_t dst = 0;
  std::uint64_t bytes = 0;
  std::uint64_t issue_seq = 0;
  std::uint64_t complete_seq = 0;
};

struct GateTraceRecord {
  std::size_t gate_index = 0;
  GateKind kind = GateKind::Hadamard;
  std::vector<int> targets;
  GateLocality locality = GateLocality::FullyLocal;
  rank_t ranks = 0;             // ranks that exchanged data
  std::uint64_t messages = 0;   // messages sent, all ranks
  std::uint64_t bytes = 0;      // bytes sent, all ranks
  std::vector<std::pair<rank_t, rank_t>> pairs;
  std::vector<MessageRecord> message_log;
};

struct CommTrace {
  PartitionPlan plan;
  ScheduleMode mode = ScheduleMode::Blocking;
  ExchangeMode exchange = ExchangeMode::Full;
  std::vector<GateTraceRecord> gates;

  std::uint64_t total_bytes() const;
  std::uint64_t total_messages() const;
  std::uint64_t distributed_gate_count() const;

  /// One JSON object per gate:
  /// {"gate_index","kind","targets","class","ranks","messages","bytes",
  ///  "mode","exchange"}.
  void write_jsonl(std::ostream& out) const;
};

struct DistributedResult {
  Statevector state;
  CommTrace trace;
};

/// Runs the circuit with the statevector split across 2^r rank buffers,
/// one full-size receive buffer per rank, and every inter-rank transfer
/// routed through a chunked exchange layer that records the trace.
/// Concatenating the rank buffers reproduces the dense engine's result.
DistributedResult run_distributed(const Circuit& circuit,
                                  const PartitionPlan& plan,
                                  ScheduleMode mode = ScheduleMode::Blocking,
                                  ExchangeMode exchange = ExchangeMode::Full,
                                  std::uint64_t initial_basis = 0);

}  // namespace svsim
