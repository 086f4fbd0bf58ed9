#include "svsim/statevector.hpp"

#include <stdexcept>
#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "generators.hpp"

using namespace svsim;

namespace {

double max_amp_deviation(const Statevector& a, const Statevector& b) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST_CASE("basis state construction") {
  Statevector zero = init_basis_state(3, 0);
  CHECK(zero[0] == amp_t{1.0, 0.0});
  for (std::uint64_t i = 1; i < 8; ++i) CHECK(zero[i] == amp_t{0.0, 0.0});

  Statevector five = init_basis_state(3, 5);
  CHECK(five[5] == amp_t{1.0, 0.0});
  CHECK(norm(five) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(init_basis_state(3, 8), std::out_of_range);
  CHECK_THROWS_AS(Statevector(31), std::invalid_argument);
  CHECK_THROWS_AS(Statevector(0), std::invalid_argument);
  CHECK_THROWS_AS(qft_oracle(4, 16), std::out_of_range);
}

TEST_CASE("single gate semantics") {
  SUBCASE("H on |0>") {
    Statevector s(1);
    apply_gate(s, Gate::hadamard(0));
    CHECK(s[0].real() == doctest::Approx(M_SQRT1_2));
    CHECK(s[1].real() == doctest::Approx(M_SQRT1_2));
  }

  SUBCASE("controlled phase acts only on |11>") {
    Statevector s = init_basis_state(2, 3);
    apply_gate(s, Gate::controlled_phase(0, 1, M_PI));
    CHECK(s[3].real() == doctest::Approx(-1.0));
    CHECK(std::abs(s[3].imag()) < 1e-15);

    Statevector t = init_basis_state(2, 1);
    apply_gate(t, Gate::controlled_phase(0, 1, M_PI));
    CHECK(t[1] == amp_t{1.0, 0.0});
  }

  SUBCASE("swap moves |001> to |100>") {
    Statevector s = init_basis_state(3, 1);
    apply_gate(s, Gate::swap(0, 2));
    CHECK(s[4] == amp_t{1.0, 0.0});
    CHECK(s[1] == amp_t{0.0, 0.0});
  }

  SUBCASE("index out of range") {
    Statevector s(2);
    CHECK_THROWS_AS(apply_gate(s, Gate::hadamard(2)), std::out_of_range);
  }
}

TEST_CASE("involutions and inverses on random states") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Statevector state(5);
    for (amp_t& a : state.amps()) a = amp_t{gauss(rng), gauss(rng)};
    const double scale = 1.0 / norm(state);
    for (amp_t& a : state.amps()) a *= scale;

    Statevector copy = state;
    apply_gate(copy, Gate::hadamard(3));
    apply_gate(copy, Gate::hadamard(3));
    CHECK(max_amp_deviation(copy, state) < 1e-12);

    copy = state;
    apply_gate(copy, Gate::swap(1, 4));
    apply_gate(copy, Gate::swap(1, 4));
    CHECK(max_amp_deviation(copy, state) < 1e-12);

    copy = state;
    apply_gate(copy, Gate::controlled_phase(0, 2, 0.83));
    apply_gate(copy, Gate::controlled_phase(0, 2, -0.83));
    CHECK(max_amp_deviation(copy, state) < 1e-12);
  }
}

TEST_CASE("run_circuit basics") {
  Statevector s = init_basis_state(3, 6);
  run_circuit(s, Circuit(3));
  CHECK(s[6] == amp_t{1.0, 0.0});

  Circuit wrong(4);
  CHECK_THROWS_AS(run_circuit(s, wrong), std::invalid_argument);

  // H H = identity on |0>.
  Statevector t(1);
  run_circuit(t, build_hadamard_bench(0, 2));
  CHECK(std::abs(t[0] - amp_t{1.0, 0.0}) < 1e-15);

  // An even swap count is the identity.
  Statevector u = init_basis_state(2, 2);
  run_circuit(u, build_swap_bench(0, 1, 2));
  CHECK(u[2] == amp_t{1.0, 0.0});
}

TEST_CASE("qft oracle values") {
  Statevector plus = qft_oracle(1, 0);
  CHECK(plus[0].real() == doctest::Approx(M_SQRT1_2));
  CHECK(plus[1].real() == doctest::Approx(M_SQRT1_2));

  Statevector minus = qft_oracle(1, 1);
  CHECK(minus[1].real() == doctest::Approx(-M_SQRT1_2));

  Statevector w = qft_oracle(4, 3);
  for (std::uint64_t j = 0; j < 16; ++j) {
    const double phase = 2.0 * M_PI * static_cast<double>((3 * j) % 16) / 16.0;
    CHECK(std::abs(w[j] - std::polar(0.25, phase)) < 1e-14);
  }
}

TEST_CASE("gate-built QFT matches the DFT oracle") {
  for (int n = 1; n <= 10; ++n) {
    std::mt19937_64 rng(100 + n);
    std::uniform_int_distribution<std::uint64_t> pick(0, (1ull << n) - 1);
    for (int trial = 0; trial < 20; ++trial) {
      const std::uint64_t x = pick(rng);
      Statevector s = init_basis_state(n, x);
      run_circuit(s, build_qft(n));
      CHECK(fidelity(s, qft_oracle(n, x)) >= 1.0 - 1e-10);
    }
  }

  // QFT of |0...0> is the uniform superposition with zero phase.
  Statevector s(6);
  run_circuit(s, build_qft(6));
  for (std::uint64_t j = 0; j < 64; ++j)
    CHECK(std::abs(s[j] - amp_t{0.125, 0.0}) < 1e-13);
}

TEST_CASE("norm preservation over random circuits") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> qubits(1, 10);
  std::uniform_int_distribution<int> len(1, 100);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = qubits(rng);
    Circuit c = svsim::testing::random_circuit(rng, n, len(rng));
    Statevector s(n);
    for (const Gate& g : c.gates) {
      apply_gate(s, g);
      CHECK(std::abs(norm(s) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("fidelity properties") {
  Statevector a = init_basis_state(2, 0);
  Statevector b = init_basis_state(2, 1);
  CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(a, b) == doctest::Approx(0.0));

  Statevector h = init_basis_state(1, 0);
  apply_gate(h, Gate::hadamard(0));
  Statevector zero(1);
  CHECK(fidelity(h, zero) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fidelity(h, zero) == doctest::Approx(fidelity(zero, h)));

  Statevector c(3);
  CHECK_THROWS_AS(fidelity(a, c), std::invalid_argument);
}

TEST_CASE("raw dump round-trips") {
  std::mt19937_64 rng(5);
  Statevector s(4);
  run_circuit(s, svsim::testing::random_circuit(rng, 4, 30));

  std::stringstream buf;
  dump_raw(s, buf);
  Statevector back = load_raw(4, buf);
  CHECK(max_amp_deviation(s, back) == 0.0);
}
