#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svsim {

enum class GateKind : std::uint8_t { Hadamard, ControlledPhase, Swap };

const char* to_string(GateKind kind);

/// One gate of the supported set. Qubit 0 is the least significant bit of
/// the amplitude index. ControlledPhase is diagonal and symmetric under
/// control/target exchange, so it is stored canonically with control < target.
struct Gate {
  GateKind kind = GateKind::Hadamard;
  int target = 0;      // Hadamard/ControlledPhase target; first Swap qubit
  int control = -1;    // ControlledPhase only
  int second = -1;     // Swap only
  double angle = 0.0;  // ControlledPhase only, radians

  static Gate hadamard(int target);
  static Gate controlled_phase(int control, int target, double angle);
  static Gate swap(int a, int b);

  int max_qubit() const;
  /// Qubit indices the gate acts on, in stored order.
  std::vector<int> qubits() const;

  bool operator==(const Gate&) const = default;
};

/// Ordered gate list over a fixed register size. Immutable by convention
/// once built; safe to share across threads.
struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;

  Circuit() = default;
  explicit Circuit(int n);

  /// Appends a gate, rejecting indices outside [0, n_qubits).
  void push(const Gate& gate);

  bool operator==(const Circuit&) const = default;
};

/// Standard QFT: for target t = n-1 down to 0, a Hadamard followed by
/// controlled phases pi/2^(t-k) from each lower qubit k, then the
/// bit-reversal swaps (i, n-1-i). Gate count n(n+1)/2 + floor(n/2).
Circuit build_qft(int n);

/// k Hadamards applied to one qubit. The register size defaults to the
/// smallest that fits the target.
Circuit build_hadamard_bench(int qubit, int count,
                             std::optional<int> n_qubits = {});

/// k identical Swap(a, b) gates.
Circuit build_swap_bench(int a, int b, int count,
                         std::optional<int> n_qubits = {});

/// Text form: first line "QUBITS <n>", then one gate per line
/// ("H <t>" | "CP <c> <t> <angle>" | "SWAP <a> <b>"). '#' starts a comment,
/// blank lines are ignored. Angles print with 17 significant digits so that
/// serialize/parse round-trips bit-exactly.
std::string serialize_circuit(const Circuit& circuit);
Circuit parse_circuit(std::string_view text);

}  // namespace svsim
