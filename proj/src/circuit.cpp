#include "svsim/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "svsim/errors.hpp"

namespace svsim {

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::Hadamard:
      return "H";
    case GateKind::ControlledPhase:
      return "CP";
    case GateKind::Swap:
      return "SWAP";
  }
  return "?";
}

Gate Gate::hadamard(int target) {
  if (target < 0) throw std::invalid_argument("hadamard: negative qubit index");
  Gate g;
  g.kind = GateKind::Hadamard;
  g.target = target;
  return g;
}

Gate Gate::controlled_phase(int control, int target, double angle) {
  if (control < 0 || target < 0)
    throw std::invalid_argument("controlled_phase: negative qubit index");
  if (control == target)
    throw std::invalid_argument("controlled_phase: control equals target");
  Gate g;
  g.kind = GateKind::ControlledPhase;
  g.control = std::min(control, target);
  g.target = std::max(control, target);
  g.angle = angle;
  return g;
}

Gate Gate::swap(int a, int b) {
  if (a < 0 || b < 0) throw std::invalid_argument("swap: negative qubit index");
  if (a == b) throw std::invalid_argument("swap: identical targets");
  Gate g;
  g.kind = GateKind::Swap;
  g.target = a;
  g.second = b;
  return g;
}

int Gate::max_qubit() const {
  switch (kind) {
    case GateKind::Hadamard:
      return target;
    case GateKind::ControlledPhase:
      return std::max(control, target);
    case GateKind::Swap:
      return std::max(target, second);
  }
  return target;
}

std::vector<int> Gate::qubits() const {
  switch (kind) {
    case GateKind::Hadamard:
      return {target};
    case GateKind::ControlledPhase:
      return {control, target};
    case GateKind::Swap:
      return {target, second};
  }
  return {};
}

Circuit::Circuit(int n) : n_qubits(n) {
  if (n < 1) throw std::invalid_argument("circuit: need at least one qubit");
}

void Circuit::push(const Gate& gate) {
  if (gate.max_qubit() >= n_qubits)
    throw std::invalid_argument("gate index out of range for " +
                                std::to_string(n_qubits) + " qubits");
  gates.push_back(gate);
}

Circuit build_qft(int n) {
  if (n < 1) throw std::invalid_argument("build_qft: register size must be >= 1");
  Circuit c(n);
  c.gates.reserve(static_cast<std::size_t>(n) * (n + 1) / 2 + n / 2);
  for (int t = n - 1; t >= 0; --t) {
    c.push(Gate::hadamard(t));
    for (int k = t - 1; k >= 0; --k)
      c.push(Gate::controlled_phase(k, t, M_PI / std::exp2(t - k)));
  }
  for (int i = 0; i < n / 2; ++i) c.push(Gate::swap(i, n - 1 - i));
  return c;
}

Circuit build_hadamard_bench(int qubit, int count, std::optional<int> n_qubits) {
  if (count < 1)
    throw std::invalid_argument("hadamard bench: gate count must be >= 1");
  int n = n_qubits.value_or(qubit + 1);
  if (qubit >= n)
    throw std::invalid_argument("hadamard bench: target outside register");
  Circuit c(n);
  c.gates.assign(static_cast<std::size_t>(count), Gate::hadamard(qubit));
  return c;
}

Circuit build_swap_bench(int a, int b, int count, std::optional<int> n_qubits) {
  if (count < 1)
    throw std::invalid_argument("swap bench: gate count must be >= 1");
  Gate g = Gate::swap(a, b);  // rejects a == b
  int n = n_qubits.value_or(g.max_qubit() + 1);
  if (g.max_qubit() >= n)
    throw std::invalid_argument("swap bench: target outside register");
  Circuit c(n);
  c.gates.assign(static_cast<std::size_t>(count), g);
  return c;
}

std::string serialize_circuit(const Circuit& circuit) {
  std::ostringstream out;
  out << "QUBITS " << circuit.n_qubits << "\n";
  char buf[64];
  for (const Gate& g : circuit.gates) {
    switch (g.kind) {
      case GateKind::Hadamard:
        out << "H " << g.target << "\n";
        break;
      case GateKind::ControlledPhase:
        std::snprintf(buf, sizeof buf, "%.17g", g.angle);
        out << "CP " << g.control << " " << g.target << " " << buf << "\n";
        break;
      case GateKind::Swap:
        out << "SWAP " << g.target << " " << g.second << "\n";
        break;
    }
  }
  return out.str();
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

int parse_index(std::string_view field, std::size_t line_no, int n_qubits) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.begin(), field.end(), value);
  if (ec != std::errc() || ptr != field.end() || value < 0)
    throw ParseError(line_no, "bad qubit index '" + std::string(field) + "'");
  if (n_qubits >= 0 && value >= n_qubits)
    throw ParseError(line_no, "qubit index " + std::to_string(value) +
                                  " out of range for " +
                                  std::to_string(n_qubits) + " qubits");
  return value;
}

double parse_angle(std::string_view field, std::size_t line_no) {
  std::string text(field);
  char* end = nullptr;
  double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(value))
    throw ParseError(line_no, "malformed angle '" + text + "'");
  return value;
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
  Circuit circuit;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    auto fields = split_fields(line);
    if (fields.empty()) continue;

    if (!have_header) {
      if (fields[0] != "QUBITS")
        throw ParseError(line_no, "expected 'QUBITS <n>' header");
      if (fields.size() != 2)
        throw ParseError(line_no, "expected 'QUBITS <n>' header");
      int n = parse_index(fields[1], line_no, -1);
      if (n < 1) throw ParseError(line_no, "register size must be >= 1");
      circuit.n_qubits = n;
      have_header = true;
      continue;
    }

    try {
      if (fields[0] == "H") {
        if (fields.size() != 2)
          throw ParseError(line_no, "H takes one qubit index");
        circuit.push(
            Gate::hadamard(parse_index(fields[1], line_no, circuit.n_qubits)));
      } else if (fields[0] == "CP") {
        if (fields.size() != 4)
          throw ParseError(line_no, "CP takes control, target, angle");
        int c = parse_index(fields[1], line_no, circuit.n_qubits);
        int t = parse_index(fields[2], line_no, circuit.n_qubits);
        circuit.push(Gate::controlled_phase(c, t, parse_angle(fields[3], line_no)));
      } else if (fields[0] == "SWAP") {
        if (fields.size() != 3)
          throw ParseError(line_no, "SWAP takes two qubit indices");
        int a = parse_index(fields[1], line_no, circuit.n_qubits);
        int b = parse_index(fields[2], line_no, circuit.n_qubits);
        circuit.push(Gate::swap(a, b));
      } else {
        throw ParseError(line_no,
                         "unknown gate mnemonic '" + std::string(fields[0]) + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!have_header) throw ParseError(1, "missing 'QUBITS <n>' header");
  return circuit;
}

}  // namespace svsim
