#pragma once

#include <cstdint>
#include <optional>

#include "svsim/circuit.hpp"

namespace svsim {

using rank_t = std::uint64_t;

/// How n qubits are split across 2^r emulated ranks: the low m = n - r
/// qubit bits address amplitudes inside a rank, the high r bits select the
/// rank. 16 bytes per amplitude.
struct PartitionPlan {
  int n_qubits = 0;
  int rank_bits = 0;      // r
  int local_qubits = 0;   // m = n - r
  std::uint64_t chunk_cap_bytes = 0;

  static constexpr std::uint64_t bytes_per_amp = 16;

  rank_t ranks() const { return rank_t{1} << rank_bits; }
  std::uint64_t local_amps() const { return std::uint64_t{1} << local_qubits; }
  std::uint64_t local_bytes() const { return local_amps() * bytes_per_amp; }

  /// Messages needed to move one full local statevector under the cap.
  std::uint64_t messages_per_exchange() const {
    return (local_bytes() + chunk_cap_bytes - 1) / chunk_cap_bytes;
  }

  bool operator==(const PartitionPlan&) const = default;
};

PartitionPlan make_plan(int n_qubits, int rank_bits, std::uint64_t chunk_cap_bytes);

/// Blocking mirrors a sequence of paired send-receives: every message
/// completes before the next is issued. Nonblocking issues every chunk of
/// a gate before completing any; the final state is identical either way.
enum class ScheduleMode : std::uint8_t { Blocking, Nonblocking };

/// Full exchanges the entire local statevector per participating rank.
/// SwapHalved moves only the amplitudes a distributed Swap actually
/// relocates: half the local statevector when one target is a local qubit.
enum class ExchangeMode : std::uint8_t { Full, SwapHalved };

const char* to_string(ScheduleMode mode);
const char* to_string(ExchangeMode mode);

enum class GateLocality : std::uint8_t {
  FullyLocal,   // diagonal: every amplitude updates independently
  LocalMemory,  // dependencies stay within one rank's partition
  Distributed,  // needs amplitudes from a partner rank
};

const char* to_string(GateLocality locality);

/// Pure classification by bit position: ControlledPhase is always
/// FullyLocal; Hadamard and Swap are Distributed once any index reaches
/// the rank bits.
GateLocality classify(const Gate& gate, const PartitionPlan& plan);

/// Partner of `rank` for a distributed gate, or nullopt when the rank sits
/// idle (a Swap on two rank bits only moves data between ranks whose two
/// bits differ). The relation is an involution and pairs are disjoint.
std::optional<rank_t> partner_rank(const Gate& gate, const PartitionPlan& plan,
                                   rank_t rank);

/// Number of ranks that exchange data for the gate (0 for local gates).
rank_t participating_ranks(const Gate& gate, const PartitionPlan& plan);

}  // namespace svsim
