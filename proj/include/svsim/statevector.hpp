#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "svsim/circuit.hpp"

namespace svsim {

using amp_t = std::complex<double>;

/// Dense array of 2^n complex amplitudes, interleaved (re, im) pairs,
/// 16 bytes per amplitude. Owned by one executor at a time; gates mutate
/// in place.
class Statevector {
 public:
  /// |0...0> on n qubits.
  explicit Statevector(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  std::uint64_t size() const { return amps_.size(); }

  std::span<const amp_t> amps() const { return amps_; }
  std::span<amp_t> amps() { return amps_; }
  amp_t operator[](std::uint64_t i) const { return amps_[i]; }

 private:
  int n_qubits_;
  std::vector<amp_t> amps_;
};

/// amp[x] = 1, all others 0.
Statevector init_basis_state(int n_qubits, std::uint64_t x);

/// Applies one gate in place. Hadamard mixes the amplitude pairs differing
/// in the target bit; ControlledPhase multiplies by e^{i angle} where both
/// bits are set; Swap exchanges amplitudes whose two bits differ.
void apply_gate(Statevector& state, const Gate& gate);

/// Applies every gate in order. The circuit and state sizes must match.
void run_circuit(Statevector& state, const Circuit& circuit);

/// Brute-force DFT reference, no gate machinery:
/// amp[j] = e^{2 pi i x j / 2^n} / sqrt(2^n). Intended for n <= ~14.
Statevector qft_oracle(int n_qubits, std::uint64_t x);

/// |<a|b>|^2, in [0, 1] for normalized inputs.
double fidelity(const Statevector& a, const Statevector& b);

/// L2 norm.
double norm(const Statevector& state);

/// Raw dump/load: little-endian (re, im) double pairs, 2^n of them.
void dump_raw(const Statevector& state, std::ostream& out);
Statevector load_raw(int n_qubits, std::istream& in);

namespace kernels {

// Low-level span kernels shared with the rank emulator. `amps.size()` must
// be a power of two and the bit positions must address it.

void hadamard(std::span<amp_t> amps, int bit);

/// amp *= phase wherever (index & mask) == mask.
void phase_where(std::span<amp_t> amps, std::uint64_t mask, amp_t phase);

void swap_bits(std::span<amp_t> amps, int bit_a, int bit_b);

}  // namespace kernels

}  // namespace svsim
