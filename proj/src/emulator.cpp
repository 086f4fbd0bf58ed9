#include "svsim/emulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace svsim {

std::uint64_t CommTrace::total_bytes() const {
  std::uint64_t sum = 0;
  for (const auto& g : gates) sum += g.bytes;
  return sum;
}

std::uint64_t CommTrace::total_messages() const {
  std::uint64_t sum = 0;
  for (const auto& g : gates) sum += g.messages;
  return sum;
}

std::uint64_t CommTrace::distributed_gate_count() const {
  std::uint64_t count = 0;
  for (const auto& g : gates)
    if (g.locality == GateLocality::Distributed) ++count;
  return count;
}

void CommTrace::write_jsonl(std::ostream& out) const {
  for (const auto& g : gates) {
    nlohmann::json rec;
    rec["gate_index"] = g.gate_index;
    rec["kind"] = to_string(g.kind);
    rec["targets"] = g.targets;
    rec["class"] = to_string(g.locality);
    rec["ranks"] = g.ranks;
    rec["messages"] = g.messages;
    rec["bytes"] = g.bytes;
    rec["mode"] = to_string(mode);
    rec["exchange"] = to_string(exchange);
    out << rec.dump() << "\n";
  }
}

namespace {

class EmulatedMachine {
 public:
  EmulatedMachine(const PartitionPlan& plan, ScheduleMode mode,
                  ExchangeMode exchange, std::uint64_t initial_basis)
      : plan_(plan), mode_(mode), exchange_(exchange) {
    if (plan.n_qubits > 30)
      throw std::invalid_argument(
          "emulator: register sizes above 30 qubits do not fit in memory");
    if (plan.rank_bits > 12)
      throw std::invalid_argument(
          "emulator: more than 2^12 emulated ranks is unsupported");
    if (initial_basis >> plan.n_qubits)
      throw std::out_of_range("emulator: initial basis index out of range");
    const std::uint64_t local = plan.local_amps();
    local_.assign(plan.ranks(), std::vector<amp_t>(local, amp_t{0.0, 0.0}));
    recv_.assign(plan.ranks(), std::vector<amp_t>(local, amp_t{0.0, 0.0}));
    local_[initial_basis >> plan.local_qubits]
          [initial_basis & (local - 1)] = amp_t{1.0, 0.0};
    trace_.plan = plan;
    trace_.mode = mode;
    trace_.exchange = exchange;
  }

  void apply(std::size_t gate_index, const Gate& gate) {
    GateTraceRecord rec;
    rec.gate_index = gate_index;
    rec.kind = gate.kind;
    rec.targets = gate.qubits();
    rec.locality = classify(gate, plan_);
    if (rec.locality == GateLocality::Distributed) {
      apply_distributed(gate, rec);
    } else {
      apply_local(gate);
    }
    trace_.gates.push_back(std::move(rec));
  }

  Statevector gather() const {
    Statevector state(plan_.n_qubits);
    auto amps = state.amps();
    const std::uint64_t local = plan_.local_amps();
    for (rank_t r = 0; r < plan_.ranks(); ++r)
      std::memcpy(amps.data() + r * local, local_[r].data(),
                  local * sizeof(amp_t));
    return state;
  }

  CommTrace take_trace() { return std::move(trace_); }

 private:
  void apply_local(const Gate& gate) {
    const int m = plan_.local_qubits;
    switch (gate.kind) {
      case GateKind::Hadamard:
        for (auto& buf : local_) kernels::hadamard(buf, gate.target);
        break;
      case GateKind::Swap:
        for (auto& buf : local_) kernels::swap_bits(buf, gate.target, gate.second);
        break;
      case GateKind::ControlledPhase: {
        // Rank bits of the gate become a participation condition; local
        // bits stay in the phase mask.
        std::uint64_t local_mask = 0, rank_mask = 0;
        for (int q : {gate.control, gate.target}) {
          if (q < m)
            local_mask |= std::uint64_t{1} << q;
          else
            rank_mask |= rank_t{1} << (q - m);
        }
        const amp_t phase = std::polar(1.0, gate.angle);
        for (rank_t r = 0; r < plan_.ranks(); ++r)
          if ((r & rank_mask) == rank_mask)
            kernels::phase_where(local_[r], local_mask, phase);
        break;
      }
    }
  }

  struct Pair {
    rank_t a, b;
  };

  std::vector<Pair> gate_pairs(const Gate& gate) const {
    std::vector<Pair> pairs;
    for (rank_t r = 0; r < plan_.ranks(); ++r) {
      auto p = partner_rank(gate, plan_, r);
      if (p && *p > r) pairs.push_back({r, *p});
    }
    return pairs;
  }

  /// Records one src->dst transfer stream of `bytes`, split at the cap.
  void record_stream(GateTraceRecord& rec, rank_t src, rank_t dst,
                     std::uint64_t bytes, std::uint64_t& issue_seq,
                     std::uint64_t complete_base) const {
    std::uint64_t left = bytes;
    while (left > 0) {
      const std::uint64_t chunk = std::min(left, plan_.chunk_cap_bytes);
      MessageRecord msg;
      msg.src = src;
      msg.dst = dst;
      msg.bytes = chunk;
      msg.issue_seq = issue_seq;
      msg.complete_seq = mode_ == ScheduleMode::Blocking
                             ? issue_seq
                             : complete_base + issue_seq;
      ++issue_seq;
      rec.message_log.push_back(msg);
      rec.messages += 1;
      rec.bytes += chunk;
      left -= chunk;
    }
  }

  /// Fills the trace for a symmetric exchange of `bytes_per_rank` between
  /// every pair. Data movement itself is done by the caller.
  void record_exchange(GateTraceRecord& rec, const std::vector<Pair>& pairs,
                       std::uint64_t bytes_per_rank) {
    const std::uint64_t chunks =
        (bytes_per_rank + plan_.chunk_cap_bytes - 1) / plan_.chunk_cap_bytes;
    const std::uint64_t total_msgs = 2 * pairs.size() * chunks;
    std::uint64_t issue_seq = 0;
    for (const Pair& p : pairs) {
      record_stream(rec, p.a, p.b, bytes_per_rank, issue_seq, total_msgs);
      record_stream(rec, p.b, p.a, bytes_per_rank, issue_seq, total_msgs);
    }
    rec.ranks = 2 * pairs.size();
    rec.pairs.reserve(pairs.size());
    for (const Pair& p : pairs) rec.pairs.emplace_back(p.a, p.b);
  }

  void apply_distributed(const Gate& gate, GateTraceRecord& rec) {
    const int m = plan_.local_qubits;
    const auto pairs = gate_pairs(gate);
    const std::uint64_t local = plan_.local_amps();

    if (gate.kind == GateKind::Hadamard) {
      record_exchange(rec, pairs, plan_.local_bytes());
      for (const Pair& p : pairs) {
        std::memcpy(recv_[p.b].data(), local_[p.a].data(), local * sizeof(amp_t));
        std::memcpy(recv_[p.a].data(), local_[p.b].data(), local * sizeof(amp_t));
      }
      const rank_t bit = rank_t{1} << (gate.target - m);
      for (const Pair& p : pairs) {
        // p.a has the target rank bit clear, p.b has it set.
        const rank_t lo = (p.a & bit) ? p.b : p.a;
        const rank_t hi = lo == p.a ? p.b : p.a;
        for (std::uint64_t i = 0; i < local; ++i) {
          const amp_t a0 = local_[lo][i];
          const amp_t a1 = recv_[lo][i];
          local_[lo][i] = (a0 + a1) * M_SQRT1_2;
          local_[hi][i] = (recv_[hi][i] - local_[hi][i]) * M_SQRT1_2;
        }
      }
      return;
    }

    // Distributed Swap.
    const int lo_q = std::min(gate.target, gate.second);
    const int hi_q = std::max(gate.target, gate.second);
    if (lo_q >= m) {
      // Both targets on rank bits: participating ranks trade their entire
      // buffers; no smaller exchange is possible, so both modes move the
      // full local statevector.
      record_exchange(rec, pairs, plan_.local_bytes());
      for (const Pair& p : pairs) {
        std::memcpy(recv_[p.b].data(), local_[p.a].data(), local * sizeof(amp_t));
        std::memcpy(recv_[p.a].data(), local_[p.b].data(), local * sizeof(amp_t));
        local_[p.a].swap(recv_[p.a]);
        local_[p.b].swap(recv_[p.b]);
      }
      return;
    }

    // One local qubit, one rank bit. Amplitudes move only where the local
    // bit differs from the rank bit, i.e. half of each buffer.
    const std::uint64_t mask_a = std::uint64_t{1} << lo_q;
    const rank_t bit_b = rank_t{1} << (hi_q - m);
    if (exchange_ == ExchangeMode::Full) {
      record_exchange(rec, pairs, plan_.local_bytes());
      for (const Pair& p : pairs) {
        std::memcpy(recv_[p.b].data(), local_[p.a].data(), local * sizeof(amp_t));
        std::memcpy(recv_[p.a].data(), local_[p.b].data(), local * sizeof(amp_t));
      }
      for (const Pair& p : pairs) {
        for (rank_t r : {p.a, p.b}) {
          const std::uint64_t moving_bit = (r & bit_b) ? 0 : mask_a;
          // Offsets whose local bit differs from the rank bit.
          for (std::uint64_t base = 0; base < local; base += 2 * mask_a)
            for (std::uint64_t low = 0; low < mask_a; ++low) {
              const std::uint64_t l = base + moving_bit + low;
              local_[r][l] = recv_[r][l ^ mask_a];
            }
        }
      }
    } else {
      // Halved: each rank packs only its moving half, in offset order.
      record_exchange(rec, pairs, plan_.local_bytes() / 2);
      for (const Pair& p : pairs) {
        for (auto [src, dst] : {std::pair{p.a, p.b}, std::pair{p.b, p.a}}) {
          const std::uint64_t moving_bit = (src & bit_b) ? 0 : mask_a;
          std::uint64_t k = 0;
          for (std::uint64_t base = 0; base < local; base += 2 * mask_a)
            for (std::uint64_t low = 0; low < mask_a; ++low)
              recv_[dst][k++] = local_[src][base + moving_bit + low];
        }
      }
      for (const Pair& p : pairs) {
        for (rank_t r : {p.a, p.b}) {
          const std::uint64_t moving_bit = (r & bit_b) ? 0 : mask_a;
          std::uint64_t k = 0;
          for (std::uint64_t base = 0; base < local; base += 2 * mask_a)
            for (std::uint64_t low = 0; low < mask_a; ++low)
              local_[r][base + moving_bit + low] = recv_[r][k++];
        }
      }
    }
  }

  PartitionPlan plan_;
  ScheduleMode mode_;
  ExchangeMode exchange_;
  std::vector<std::vector<amp_t>> local_;
  std::vector<std::vector<amp_t>> recv_;
  CommTrace trace_;
};

}  // namespace

DistributedResult run_distributed(const Circuit& circuit,
                                  const PartitionPlan& plan,
                                  ScheduleMode mode, ExchangeMode exchange,
                                  std::uint64_t initial_basis) {
  if (circuit.n_qubits != plan.n_qubits)
    throw std::invalid_argument("run_distributed: circuit size " +
                                std::to_string(circuit.n_qubits) +
                                " does not match plan size " +
                                std::to_string(plan.n_qubits));
  EmulatedMachine machine(plan, mode, exchange, initial_basis);
  for (std::size_t i = 0; i < circuit.gates.size(); ++i)
    machine.apply(i, circuit.gates[i]);
  return DistributedResult{machine.gather(), machine.take_trace()};
}

}  // namespace svsim
