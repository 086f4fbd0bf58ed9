#include "svsim/statevector.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace svsim {

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 30)
    throw std::invalid_argument("statevector: qubit count outside [1, 30]");
  amps_.assign(std::uint64_t{1} << n_qubits, amp_t{0.0, 0.0});
  amps_[0] = amp_t{1.0, 0.0};
}

Statevector init_basis_state(int n_qubits, std::uint64_t x) {
  Statevector state(n_qubits);
  if (x >= state.size())
    throw std::out_of_range("basis index " + std::to_string(x) +
                            " out of range for " + std::to_string(n_qubits) +
                            " qubits");
  state.amps()[0] = amp_t{0.0, 0.0};
  state.amps()[x] = amp_t{1.0, 0.0};
  return state;
}

namespace kernels {

void hadamard(std::span<amp_t> amps, int bit) {
  const std::uint64_t m = std::uint64_t{1} << bit;
  const std::uint64_t n = amps.size();
  for (std::uint64_t top = 0; top < n; top += 2 * m) {
    for (std::uint64_t low = 0; low < m; ++low) {
      const std::uint64_t j = top + low;
      const amp_t a0 = amps[j];
      const amp_t a1 = amps[j + m];
      amps[j] = (a0 + a1) * M_SQRT1_2;
      amps[j + m] = (a0 - a1) * M_SQRT1_2;
    }
  }
}

void phase_where(std::span<amp_t> amps, std::uint64_t mask, amp_t phase) {
  const std::uint64_t last = amps.size() - 1;
  if (mask > last) return;  // no index can satisfy the mask
  // (j + 1) | mask walks exactly the indices whose mask bits are all set.
  for (std::uint64_t j = mask;; j = (j + 1) | mask) {
    amps[j] *= phase;
    if (j == last) break;
  }
}

void swap_bits(std::span<amp_t> amps, int bit_a, int bit_b) {
  const int lo = std::min(bit_a, bit_b);
  const int hi = std::max(bit_a, bit_b);
  const std::uint64_t mlo = std::uint64_t{1} << lo;
  const std::uint64_t mhi = std::uint64_t{1} << hi;
  const std::uint64_t mask = mlo | mhi;
  const std::uint64_t n = amps.size();
  // One representative per moving pair: bit hi set, bit lo clear.
  for (std::uint64_t top = 0; top < n; top += 2 * mhi)
    for (std::uint64_t mid = 0; mid < mhi; mid += 2 * mlo)
      for (std::uint64_t low = 0; low < mlo; ++low) {
        const std::uint64_t j = top + mhi + mid + low;
        std::swap(amps[j], amps[j ^ mask]);
      }
}

}  // namespace kernels

void apply_gate(Statevector& state, const Gate& gate) {
  if (gate.max_qubit() >= state.n_qubits())
    throw std::out_of_range("gate index out of range for " +
                            std::to_string(state.n_qubits()) + " qubits");
  auto amps = state.amps();
  switch (gate.kind) {
    case GateKind::Hadamard:
      kernels::hadamard(amps, gate.target);
      break;
    case GateKind::ControlledPhase:
      kernels::phase_where(amps,
                           (std::uint64_t{1} << gate.control) |
                               (std::uint64_t{1} << gate.target),
                           std::polar(1.0, gate.angle));
      break;
    case GateKind::Swap:
      kernels::swap_bits(amps, gate.target, gate.second);
      break;
  }
}

void run_circuit(Statevector& state, const Circuit& circuit) {
  if (circuit.n_qubits != state.n_qubits())
    throw std::invalid_argument("circuit size " +
                                std::to_string(circuit.n_qubits) +
                                " does not match state size " +
                                std::to_string(state.n_qubits()));
  for (const Gate& g : circuit.gates) apply_gate(state, g);
}

Statevector qft_oracle(int n_qubits, std::uint64_t x) {
  Statevector state(n_qubits);
  const std::uint64_t n = state.size();
  if (x >= n)
    throw std::out_of_range("basis index out of range for qft oracle");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  auto amps = state.amps();
  for (std::uint64_t j = 0; j < n; ++j) {
    const std::uint64_t k = (x * j) & (n - 1);  // exponent mod 2^n
    const double phase = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    amps[j] = std::polar(scale, phase);
  }
  return state;
}

double fidelity(const Statevector& a, const Statevector& b) {
  if (a.n_qubits() != b.n_qubits())
    throw std::invalid_argument("fidelity: state sizes differ");
  long double re = 0.0L, im = 0.0L;
  auto pa = a.amps();
  auto pb = b.amps();
  for (std::uint64_t i = 0; i < pa.size(); ++i) {
    const amp_t p = std::conj(pa[i]) * pb[i];
    re += p.real();
    im += p.imag();
  }
  return static_cast<double>(re * re + im * im);
}

double norm(const Statevector& state) {
  long double sum = 0.0L;
  for (const amp_t& a : state.amps()) sum += std::norm(a);
  return static_cast<double>(std::sqrt(sum));
}

void dump_raw(const Statevector& state, std::ostream& out) {
  // Little-endian (re, im) pairs; written as host doubles on x86.
  out.write(reinterpret_cast<const char*>(state.amps().data()),
            static_cast<std::streamsize>(state.size() * sizeof(amp_t)));
}

Statevector load_raw(int n_qubits, std::istream& in) {
  Statevector state(n_qubits);
  in.read(reinterpret_cast<char*>(state.amps().data()),
          static_cast<std::streamsize>(state.size() * sizeof(amp_t)));
  if (!in) throw std::runtime_error("raw state dump truncated");
  return state;
}

}  // namespace svsim
