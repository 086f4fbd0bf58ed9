#include "svsim/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "svsim/errors.hpp"

namespace svsim {

double energy_network(std::uint64_t nodes, double dt_seconds,
                      const MachineConfig& cfg) {
  if (dt_seconds < 0.0)
    throw std::invalid_argument("energy_network: negative duration");
  if (nodes < 1) throw std::invalid_argument("energy_network: no nodes");
  const std::uint64_t switches =
      (nodes + cfg.switch_ratio - 1) / cfg.switch_ratio;
  return static_cast<double>(switches) * cfg.switch_power_watts * dt_seconds;
}

std::uint64_t min_nodes(int n_qubits, std::uint64_t node_mem_bytes) {
  if (n_qubits < 1 || n_qubits > 50)
    throw std::invalid_argument("min_nodes: register size outside [1, 50]");
  if (node_mem_bytes == 0)
    throw std::invalid_argument("min_nodes: empty node memory");
  // Single node runs need no exchange buffer; distributed ranks hold the
  // local statevector plus a same-size receive buffer. A node is full at
  // exactly its memory size.
  if ((std::uint64_t{1} << n_qubits) * 16 < node_mem_bytes) return 1;
  for (int r = 1; r < n_qubits; ++r) {
    if ((std::uint64_t{1} << (n_qubits - r)) * 32 < node_mem_bytes)
      return std::uint64_t{1} << r;
  }
  throw std::invalid_argument("min_nodes: statevector does not fit");
}

namespace {

const NodePower* find_power(const std::map<double, NodePower>& map,
                            double frequency_ghz) {
  for (const auto& [freq, power] : map)
    if (std::abs(freq - frequency_ghz) < 1e-6) return &power;
  return nullptr;
}

NodePower power_for(const CostParams& params, const MachineConfig& cfg) {
  if (const NodePower* p = find_power(cfg.node_power_watts, cfg.frequency_ghz))
    return *p;
  if (const NodePower* p =
          find_power(params.node_power_watts, cfg.frequency_ghz))
    return *p;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", cfg.frequency_ghz);
  throw std::invalid_argument(std::string("unknown frequency ") + buf +
                              " GHz: no node power entry");
}

/// Amplitudes the critical rank touches. A controlled phase only visits
/// indices with both its bits set, so each local endpoint quarters or
/// halves the work; rank-bit endpoints merely gate which ranks act.
std::uint64_t amps_touched(const Gate& gate, const PartitionPlan& plan) {
  if (gate.kind != GateKind::ControlledPhase) return plan.local_amps();
  const int m = plan.local_qubits;
  const int local_endpoints = (gate.control < m ? 1 : 0) + (gate.target < m ? 1 : 0);
  return plan.local_amps() >> local_endpoints;
}

double exchange_seconds(const PartitionPlan& plan, const CostParams& params,
                        ScheduleMode mode) {
  const double bytes = static_cast<double>(plan.local_bytes());
  const double chunks = static_cast<double>(plan.messages_per_exchange());
  if (mode == ScheduleMode::Blocking)
    return chunks * params.alpha + bytes * params.beta;
  return params.alpha + bytes * params.beta / params.kappa;
}

}  // namespace

GateCost predict_gate(std::size_t gate_index, const Gate& gate,
                      const PartitionPlan& plan, const CostParams& params,
                      const MachineConfig& cfg, ScheduleMode mode) {
  GateCost cost;
  cost.gate_index = gate_index;
  cost.kind = gate.kind;
  cost.locality = classify(gate, plan);

  if (cfg.frequency_ghz <= 0.0)
    throw std::invalid_argument("frequency must be positive");
  const double scale =
      params.compute_fraction * (params.f_ref_ghz / cfg.frequency_ghz) +
      (1.0 - params.compute_fraction);
  const double per_amp = params.t_amp_mem + params.t_amp_compute * scale;
  cost.seconds = static_cast<double>(amps_touched(gate, plan)) * per_amp;

  if (cost.locality == GateLocality::Distributed) {
    cost.exchange_seconds = exchange_seconds(plan, params, mode);
    cost.seconds += cost.exchange_seconds;
    const rank_t participants = participating_ranks(gate, plan);
    cost.bytes = participants * plan.local_bytes();
    cost.messages = participants * plan.messages_per_exchange();
  }

  const NodePower power = power_for(params, cfg);
  const double watts = cost.locality == GateLocality::Distributed
                           ? power.distributed_w
                           : power.local_w;
  cost.node_energy_j = static_cast<double>(cfg.nodes) * watts * cost.seconds;
  return cost;
}

double predict_gate_time(const Gate& gate, const PartitionPlan& plan,
                         const CostParams& params, const MachineConfig& cfg,
                         ScheduleMode mode) {
  return predict_gate(0, gate, plan, params, cfg, mode).seconds;
}

RunReport predict_circuit(const Circuit& circuit, const PartitionPlan& plan,
                          const CostParams& params, const MachineConfig& cfg,
                          ScheduleMode mode) {
  if (circuit.n_qubits != plan.n_qubits)
    throw std::invalid_argument("predict_circuit: circuit does not match plan");
  power_for(params, cfg);  // fail fast on unknown frequencies
  RunReport report;
  report.per_gate.reserve(circuit.gates.size());
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    GateCost cost = predict_gate(i, circuit.gates[i], plan, params, cfg, mode);
    report.runtime_s += cost.seconds;
    report.node_energy_j += cost.node_energy_j;
    report.per_gate.push_back(cost);
  }
  report.network_energy_j = energy_network(cfg.nodes, report.runtime_s, cfg);
  report.total_energy_j = report.node_energy_j + report.network_energy_j;
  return report;
}

std::vector<CalRecord> sample_hadamard_corpus() {
  const PartitionPlan plan = make_plan(38, 6, std::uint64_t{2} << 30);
  return {
      {GateLocality::LocalMemory, ScheduleMode::Blocking, plan, 64, 2.0, 0.51,
       15300.0},
      {GateLocality::LocalMemory, ScheduleMode::Nonblocking, plan, 64, 2.0,
       0.53, 15000.0},
      {GateLocality::Distributed, ScheduleMode::Blocking, plan, 64, 2.0, 9.63,
       191000.0},
      {GateLocality::Distributed, ScheduleMode::Nonblocking, plan, 64, 2.0,
       8.82, 179000.0},
  };
}

CalibrationResult calibrate(const std::vector<CalRecord>& records,
                            const CalibrationOptions& options) {
  std::vector<const CalRecord*> locals, dist_blocking, dist_nonblocking;
  for (const CalRecord& rec : records) {
    if (rec.seconds <= 0.0)
      throw CalibrationError("calibration record with non-positive time");
    if (rec.nodes < 1)
      throw CalibrationError("calibration record with no nodes");
    if (rec.locality == GateLocality::Distributed) {
      (rec.mode == ScheduleMode::Blocking ? dist_blocking : dist_nonblocking)
          .push_back(&rec);
    } else {
      locals.push_back(&rec);
    }
  }
  if (locals.empty() || (dist_blocking.empty() && dist_nonblocking.empty())) {
    std::string missing;
    if (locals.empty()) missing += " local";
    if (dist_blocking.empty() && dist_nonblocking.empty())
      missing += " distributed";
    throw CalibrationError("calibration corpus is missing" + missing +
                           " records");
  }

  CostParams params;
  params.f_ref_ghz = options.f_ref_ghz;
  params.compute_fraction = options.compute_fraction;

  // Per-amplitude time from the local rows, normalized by the frequency
  // blend so mixed-frequency corpora fit the same tau.
  {
    long double num = 0.0L, den = 0.0L;
    for (const CalRecord* rec : locals) {
      const double scale =
          options.compute_fraction * (options.f_ref_ghz / rec->frequency_ghz) +
          (1.0 - options.compute_fraction);
      const double blend = (1.0 - options.compute_fraction) +
                           options.compute_fraction * scale;
      const double a = static_cast<double>(rec->plan.local_amps()) * blend;
      num += static_cast<long double>(rec->seconds) * a;
      den += static_cast<long double>(a) * a;
    }
    const double tau = static_cast<double>(num / den);
    params.t_amp_compute = options.compute_fraction * tau;
    params.t_amp_mem = (1.0 - options.compute_fraction) * tau;
  }

  auto local_model_seconds = [&](const CalRecord& rec) {
    const double scale =
        params.compute_fraction * (params.f_ref_ghz / rec.frequency_ghz) +
        (1.0 - params.compute_fraction);
    return static_cast<double>(rec.plan.local_amps()) *
           (params.t_amp_mem + params.t_amp_compute * scale);
  };

  // alpha and beta from blocking exchanges; with one record the latency
  // term is unidentifiable and alpha stays 0.
  auto fit_beta_only = [&](const std::vector<const CalRecord*>& recs) {
    long double num = 0.0L, den = 0.0L;
    for (const CalRecord* rec : recs) {
      const double exch = rec->seconds - local_model_seconds(*rec);
      const double bytes = static_cast<double>(rec->plan.local_bytes());
      num += static_cast<long double>(exch) * bytes;
      den += static_cast<long double>(bytes) * bytes;
    }
    return std::max(0.0, static_cast<double>(num / den));
  };

  if (!dist_blocking.empty()) {
    if (dist_blocking.size() == 1) {
      params.alpha = 0.0;
      params.beta = fit_beta_only(dist_blocking);
    } else {
      long double scc = 0, scb = 0, sbb = 0, sec = 0, seb = 0;
      for (const CalRecord* rec : dist_blocking) {
        const double exch = rec->seconds - local_model_seconds(*rec);
        const double c = static_cast<double>(rec->plan.messages_per_exchange());
        const double b = static_cast<double>(rec->plan.local_bytes());
        scc += static_cast<long double>(c) * c;
        scb += static_cast<long double>(c) * b;
        sbb += static_cast<long double>(b) * b;
        sec += static_cast<long double>(exch) * c;
        seb += static_cast<long double>(exch) * b;
      }
      const long double det = scc * sbb - scb * scb;
      if (std::abs(static_cast<double>(det)) <
          1e-12 * std::abs(static_cast<double>(scc * sbb))) {
        params.alpha = 0.0;
        params.beta = fit_beta_only(dist_blocking);
      } else {
        params.alpha = static_cast<double>((sec * sbb - seb * scb) / det);
        params.beta = static_cast<double>((scc * seb - scb * sec) / det);
        if (params.alpha < 0.0 || params.beta < 0.0) {
          params.alpha = 0.0;
          params.beta = fit_beta_only(dist_blocking);
        }
      }
    }
    // kappa from the nonblocking exchanges given beta.
    if (!dist_nonblocking.empty()) {
      long double sum = 0.0L;
      std::size_t count = 0;
      for (const CalRecord* rec : dist_nonblocking) {
        const double exch =
            rec->seconds - local_model_seconds(*rec) - params.alpha;
        const double bytes = static_cast<double>(rec->plan.local_bytes());
        if (exch > 0.0 && params.beta > 0.0) {
          sum += static_cast<long double>(bytes) * params.beta / exch;
          ++count;
        }
      }
      if (count > 0) params.kappa = static_cast<double>(sum) / count;
      if (params.kappa < 1.0) {
        params.kappa = 1.0;
        params.kappa_clamped = true;
      }
    }
  } else {
    // Only nonblocking distributed data: beta absorbs the overlap.
    params.alpha = 0.0;
    params.kappa = 1.0;
    params.beta = fit_beta_only(dist_nonblocking);
  }

  // Node power per frequency and gate class, network estimate subtracted.
  {
    std::map<double, std::pair<std::vector<double>, std::vector<double>>> draws;
    for (const CalRecord& rec : records) {
      if (rec.joules <= 0.0) continue;
      const std::uint64_t switches =
          (rec.nodes + options.switch_ratio - 1) / options.switch_ratio;
      const double net = static_cast<double>(switches) *
                         options.switch_power_watts * rec.seconds;
      const double watts = (rec.joules - net) /
                           (static_cast<double>(rec.nodes) * rec.seconds);
      auto& bucket = draws[rec.frequency_ghz];
      (rec.locality == GateLocality::Distributed ? bucket.second : bucket.first)
          .push_back(watts);
    }
    for (const auto& [freq, bucket] : draws) {
      NodePower power;
      auto mean = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        long double s = 0.0L;
        for (double x : v) s += x;
        return static_cast<double>(s) / static_cast<double>(v.size());
      };
      power.local_w = mean(bucket.first);
      power.distributed_w = mean(bucket.second);
      if (bucket.first.empty()) power.local_w = power.distributed_w;
      if (bucket.second.empty()) power.distributed_w = power.local_w;
      params.node_power_watts[freq] = power;
    }
  }

  // Residuals: forward-model every record with the fitted parameters.
  CalibrationResult result;
  result.params = params;
  result.residuals.reserve(records.size());
  for (const CalRecord& rec : records) {
    CalResidual res;
    res.measured_s = rec.seconds;
    res.predicted_s = local_model_seconds(rec);
    if (rec.locality == GateLocality::Distributed)
      res.predicted_s += exchange_seconds(rec.plan, params, rec.mode);
    res.rel_time_error = (res.predicted_s - res.measured_s) / res.measured_s;

    res.measured_j = rec.joules;
    const NodePower* power = find_power(params.node_power_watts, rec.frequency_ghz);
    if (power && rec.joules > 0.0) {
      const double watts = rec.locality == GateLocality::Distributed
                               ? power->distributed_w
                               : power->local_w;
      const std::uint64_t switches =
          (rec.nodes + options.switch_ratio - 1) / options.switch_ratio;
      res.predicted_j = (static_cast<double>(rec.nodes) * watts +
                         static_cast<double>(switches) *
                             options.switch_power_watts) *
                        res.predicted_s;
      res.rel_energy_error = (res.predicted_j - res.measured_j) / res.measured_j;
    }
    result.residuals.push_back(res);
  }
  return result;
}

CostParams default_cost_params() {
  CostParams params = calibrate(sample_hadamard_corpus()).params;
  // The corpus only covers 2.00 GHz. Lowering the clock left measured
  // energy flat, so 1.50 GHz inherits the same draw; the high bin defaults
  // to a third more until the user calibrates it.
  const NodePower base = params.node_power_watts.at(2.0);
  params.node_power_watts[1.5] = base;
  params.node_power_watts[2.25] =
      NodePower{base.local_w * 4.0 / 3.0, base.distributed_w * 4.0 / 3.0};
  return params;
}

std::vector<CalRecord> parse_calibration_csv(std::istream& in) {
  std::vector<CalRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::size_t hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      const std::size_t a = field.find_first_not_of(" \t\r");
      const std::size_t b = field.find_last_not_of(" \t\r");
      fields.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
    }
    if (!fields.empty() && fields[0] == "class") continue;  // header
    if (fields.size() != 9)
      throw ParseError(line_no, "expected 9 calibration fields, got " +
                                    std::to_string(fields.size()));
    try {
      CalRecord rec;
      if (fields[0] == "local" || fields[0] == "local_memory")
        rec.locality = GateLocality::LocalMemory;
      else if (fields[0] == "fully_local")
        rec.locality = GateLocality::FullyLocal;
      else if (fields[0] == "distributed")
        rec.locality = GateLocality::Distributed;
      else
        throw ParseError(line_no, "unknown gate class '" + fields[0] + "'");
      if (fields[1] == "blocking")
        rec.mode = ScheduleMode::Blocking;
      else if (fields[1] == "nonblocking")
        rec.mode = ScheduleMode::Nonblocking;
      else
        throw ParseError(line_no, "unknown mode '" + fields[1] + "'");
      rec.plan = make_plan(std::stoi(fields[2]), std::stoi(fields[3]),
                           std::stoull(fields[4]));
      rec.nodes = std::stoull(fields[5]);
      rec.frequency_ghz = std::stod(fields[6]);
      rec.seconds = std::stod(fields[7]);
      rec.joules = std::stod(fields[8]);
      records.push_back(rec);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    } catch (const std::out_of_range& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return records;
}

namespace {

std::string format_frequency(double freq) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", freq);
  return buf;
}

nlohmann::json power_map_to_json(const std::map<double, NodePower>& map) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [freq, power] : map)
    j[format_frequency(freq)] = {{"local", power.local_w},
                                 {"distributed", power.distributed_w}};
  return j;
}

std::map<double, NodePower> power_map_from_json(const nlohmann::json& j) {
  std::map<double, NodePower> map;
  for (auto it = j.begin(); it != j.end(); ++it) {
    NodePower power;
    power.local_w = it.value().at("local").get<double>();
    power.distributed_w = it.value().at("distributed").get<double>();
    map[std::stod(it.key())] = power;
  }
  return map;
}

}  // namespace

std::string cost_params_to_json(const CostParams& params) {
  nlohmann::json j;
  j["t_amp_compute"] = params.t_amp_compute;
  j["t_amp_mem"] = params.t_amp_mem;
  j["alpha"] = params.alpha;
  j["beta"] = params.beta;
  j["kappa"] = params.kappa;
  j["f_ref_ghz"] = params.f_ref_ghz;
  j["compute_fraction"] = params.compute_fraction;
  j["kappa_clamped"] = params.kappa_clamped;
  j["node_power_watts"] = power_map_to_json(params.node_power_watts);
  return j.dump(2);
}

CostParams cost_params_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CostParams params;
  params.t_amp_compute = j.at("t_amp_compute").get<double>();
  params.t_amp_mem = j.at("t_amp_mem").get<double>();
  params.alpha = j.at("alpha").get<double>();
  params.beta = j.at("beta").get<double>();
  params.kappa = j.at("kappa").get<double>();
  params.f_ref_ghz = j.at("f_ref_ghz").get<double>();
  params.compute_fraction = j.at("compute_fraction").get<double>();
  if (j.contains("kappa_clamped"))
    params.kappa_clamped = j.at("kappa_clamped").get<bool>();
  if (j.contains("node_power_watts"))
    params.node_power_watts = power_map_from_json(j.at("node_power_watts"));
  return params;
}

std::string machine_to_json(const MachineConfig& cfg) {
  nlohmann::json j;
  j["nodes"] = cfg.nodes;
  j["node_mem_bytes"] = cfg.node_mem_bytes;
  j["switch_ratio"] = cfg.switch_ratio;
  j["switch_power_watts"] = cfg.switch_power_watts;
  j["frequency_ghz"] = cfg.frequency_ghz;
  j["node_power_watts"] = power_map_to_json(cfg.node_power_watts);
  return j.dump(2);
}

MachineConfig machine_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  MachineConfig cfg;
  if (j.contains("nodes")) cfg.nodes = j.at("nodes").get<std::uint64_t>();
  if (j.contains("node_mem_bytes"))
    cfg.node_mem_bytes = j.at("node_mem_bytes").get<std::uint64_t>();
  if (j.contains("switch_ratio"))
    cfg.switch_ratio = j.at("switch_ratio").get<std::uint64_t>();
  if (j.contains("switch_power_watts"))
    cfg.switch_power_watts = j.at("switch_power_watts").get<double>();
  if (j.contains("frequency_ghz"))
    cfg.frequency_ghz = j.at("frequency_ghz").get<double>();
  if (j.contains("node_power_watts"))
    cfg.node_power_watts = power_map_from_json(j.at("node_power_watts"));
  if (cfg.switch_ratio == 0)
    throw std::invalid_argument("machine config: switch_ratio must be >= 1");
  return cfg;
}

void write_report_json(const RunReport& report, std::ostream& out) {
  nlohmann::json j;
  j["runtime_s"] = report.runtime_s;
  j["node_energy_j"] = report.node_energy_j;
  j["network_energy_j"] = report.network_energy_j;
  j["total_energy_j"] = report.total_energy_j;
  nlohmann::json gates = nlohmann::json::array();
  for (const GateCost& g : report.per_gate) {
    gates.push_back({{"gate_index", g.gate_index},
                     {"kind", to_string(g.kind)},
                     {"class", to_string(g.locality)},
                     {"seconds", g.seconds},
                     {"exchange_seconds", g.exchange_seconds},
                     {"node_energy_j", g.node_energy_j},
                     {"bytes", g.bytes},
                     {"messages", g.messages}});
  }
  j["per_gate"] = gates;
  out << j.dump(2) << "\n";
}

void write_report_csv(const RunReport& report, std::ostream& out) {
  out << "row,gate_index,kind,class,seconds,exchange_seconds,node_energy_j,"
         "network_energy_j,total_energy_j,bytes,messages\n";
  char buf[512];
  for (const GateCost& g : report.per_gate) {
    std::snprintf(buf, sizeof buf, "gate,%zu,%s,%s,%.9g,%.9g,%.9g,,,%llu,%llu\n",
                  g.gate_index, to_string(g.kind), to_string(g.locality),
                  g.seconds, g.exchange_seconds, g.node_energy_j,
                  static_cast<unsigned long long>(g.bytes),
                  static_cast<unsigned long long>(g.messages));
    out << buf;
  }
  std::uint64_t bytes = 0, messages = 0;
  for (const GateCost& g : report.per_gate) {
    bytes += g.bytes;
    messages += g.messages;
  }
  std::snprintf(buf, sizeof buf, "total,,,,%.9g,,%.9g,%.9g,%.9g,%llu,%llu\n",
                report.runtime_s, report.node_energy_j,
                report.network_energy_j, report.total_energy_j,
                static_cast<unsigned long long>(bytes),
                static_cast<unsigned long long>(messages));
  out << buf;
}

}  // namespace svsim
