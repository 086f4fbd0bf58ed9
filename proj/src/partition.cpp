#include "svsim/partition.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace svsim {

PartitionPlan make_plan(int n_qubits, int rank_bits, std::uint64_t chunk_cap_bytes) {
  if (n_qubits < 1) throw std::invalid_argument("plan: need at least one qubit");
  if (rank_bits < 0) throw std::invalid_argument("plan: negative rank bits");
  if (rank_bits >= n_qubits)
    throw std::invalid_argument("plan: " + std::to_string(rank_bits) +
                                " rank bits leave no local qubits for n = " +
                                std::to_string(n_qubits));
  if (n_qubits > 50)
    throw std::invalid_argument("plan: register sizes above 50 qubits overflow "
                                "the byte accounting");
  if (chunk_cap_bytes == 0)
    throw std::invalid_argument("plan: message cap must be positive");
  PartitionPlan plan;
  plan.n_qubits = n_qubits;
  plan.rank_bits = rank_bits;
  plan.local_qubits = n_qubits - rank_bits;
  plan.chunk_cap_bytes = chunk_cap_bytes;
  return plan;
}

const char* to_string(ScheduleMode mode) {
  return mode == ScheduleMode::Blocking ? "blocking" : "nonblocking";
}

const char* to_string(ExchangeMode mode) {
  return mode == ExchangeMode::Full ? "full" : "swap_halved";
}

const char* to_string(GateLocality locality) {
  switch (locality) {
    case GateLocality::FullyLocal:
      return "fully_local";
    case GateLocality::LocalMemory:
      return "local_memory";
    case GateLocality::Distributed:
      return "distributed";
  }
  return "?";
}

GateLocality classify(const Gate& gate, const PartitionPlan& plan) {
  if (gate.max_qubit() >= plan.n_qubits)
    throw std::invalid_argument("classify: gate does not fit the plan");
  switch (gate.kind) {
    case GateKind::ControlledPhase:
      return GateLocality::FullyLocal;
    case GateKind::Hadamard:
      return gate.target < plan.local_qubits ? GateLocality::LocalMemory
                                             : GateLocality::Distributed;
    case GateKind::Swap:
      return gate.max_qubit() < plan.local_qubits ? GateLocality::LocalMemory
                                                  : GateLocality::Distributed;
  }
  return GateLocality::FullyLocal;
}

std::optional<rank_t> partner_rank(const Gate& gate, const PartitionPlan& plan,
                                   rank_t rank) {
  if (classify(gate, plan) != GateLocality::Distributed)
    throw std::invalid_argument("partner_rank: gate is not distributed");
  if (rank >= plan.ranks())
    throw std::out_of_range("partner_rank: rank out of range");
  const int m = plan.local_qubits;
  if (gate.kind == GateKind::Hadamard)
    return rank ^ (rank_t{1} << (gate.target - m));

  const int lo = std::min(gate.target, gate.second);
  const int hi = std::max(gate.target, gate.second);
  if (lo < m) {
    // One local qubit, one rank bit: every rank pairs across the rank bit.
    return rank ^ (rank_t{1} << (hi - m));
  }
  // Two rank bits: only ranks whose two bits differ hold moving amplitudes.
  const rank_t bit_lo = (rank >> (lo - m)) & 1;
  const rank_t bit_hi = (rank >> (hi - m)) & 1;
  if (bit_lo == bit_hi) return std::nullopt;
  return rank ^ ((rank_t{1} << (lo - m)) | (rank_t{1} << (hi - m)));
}

rank_t participating_ranks(const Gate& gate, const PartitionPlan& plan) {
  if (classify(gate, plan) != GateLocality::Distributed) return 0;
  const int m = plan.local_qubits;
  if (gate.kind == GateKind::Swap && std::min(gate.target, gate.second) >= m)
    return plan.ranks() / 2;  // bits equal on the other half
  return plan.ranks();
}

}  // namespace svsim
