#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svsim/circuit.hpp"
#include "svsim/partition.hpp"

namespace svsim {

/// mapping[logical] = physical qubit the logical qubit currently lives on.
struct QubitPermutation {
  std::vector<int> mapping;

  static QubitPermutation identity(int n);
  static QubitPermutation bit_reversal(int n);  // q -> n-1-q

  int operator()(int qubit) const { return mapping.at(qubit); }
  bool is_bijection() const;

  /// Returns the gate with every index remapped.
  Gate apply(const Gate& gate) const;
};

/// Cache-blocked QFT: the register is processed in ascending target order,
/// the bit-reversal swap block runs once `swap_after` Hadamards have been
/// emitted (default m), and every gate after the block is vertically
/// flipped (indices remapped q -> n-1-q). All Hadamards then land on
/// qubits below m, so under a plan with at least m local qubits the swap
/// block carries the only communication. Gate multiset matches build_qft.
///
/// The produced circuit computes the QFT with the register bit order
/// reversed at both ends relative to build_qft: conjugating by the
/// reversal swaps (see conjugate_by_bit_reversal) recovers build_qft's
/// unitary exactly. For n <= m there is nothing to block and build_qft(n)
/// is returned unchanged.
Circuit block_qft(int n, int m, std::optional<int> swap_after = {});

/// Wraps a circuit in leading and trailing bit-reversal swap blocks,
/// changing only the bit-order convention of input and output.
Circuit conjugate_by_bit_reversal(const Circuit& circuit);

struct CommStats {
  std::uint64_t distributed_gates = 0;
  std::uint64_t bytes = 0;
  std::uint64_t messages = 0;

  bool operator==(const CommStats&) const = default;
};

/// Static full-exchange communication totals; agrees byte-for-byte with the
/// CommTrace of run_distributed in full mode.
CommStats comm_stats(const Circuit& circuit, const PartitionPlan& plan);

/// {"distributed_gates", "bytes", "messages", "plan":{"n","r","m","chunk_cap"}}
std::string comm_stats_json(const CommStats& stats, const PartitionPlan& plan);

struct EquivalenceReport {
  double max_infidelity = 0.0;
  bool pass = false;
};

/// Runs both circuits on common inputs through the dense engine and reports
/// the worst 1 - fidelity. Uses every basis state when the register is small
/// enough and `trials` does not restrict it; otherwise `trials` seeded
/// random states.
EquivalenceReport verify_equivalence(const Circuit& a, const Circuit& b,
                                     std::uint64_t trials = 0,
                                     double tolerance = 1e-10);

}  // namespace svsim
