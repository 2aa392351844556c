#include "workfn/capacity.h"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "workfn/bits.h"
#include "workfn/machine_io.h"

namespace workfn {

using nlohmann::json;

double SiliconSubsystem::bytes() const {
  const double per_unit = kind == SubsystemKind::logic ? transistor_count * bits_per_transistor / 8.0 : capacity_bytes;
  return per_unit * count;
}

double silicon_capacity(const std::vector<SiliconSubsystem>& subsystems) {
  if (subsystems.empty()) throw Error(ErrorKind::invalid_argument, "no subsystems");
  double total = 0;
  for (const auto& s : subsystems) {
    if (s.clock_hz <= 0 || s.count <= 0) throw Error(ErrorKind::invalid_argument, "subsystem " + s.name + ": clock and count must be positive");
    total += s.bytes_per_second();
  }
  return total;
}

double db_scale(double rate) {
  if (!(rate > 0)) throw Error(ErrorKind::invalid_argument, "dB scale needs a positive rate");
  return 10.0 * std::log10(rate / 1e12);
}

double db_to_rate(double db) { return 1e12 * std::pow(10.0, db / 10.0); }

double synapse_descriptor_bits(const SynapsePopulation& p) {
  return p.origin_bits + p.position_bits + p.pre_state_bits + p.post_state_bits + p.timing_bits +
         8.0 * p.dynamic_complexity_bytes;
}

double synapse_descriptor_bytes(const SynapsePopulation& p, bool byte_rounding) {
  if (byte_rounding && p.rounded_descriptor_bytes) return *p.rounded_descriptor_bytes + p.dynamic_complexity_bytes;
  return synapse_descriptor_bits(p) / 8.0;
}

double neural_capacity(const SynapsePopulation& p, bool byte_rounding) {
  if (!(p.rate_hz > 0)) throw Error(ErrorKind::invalid_argument, "synapse rate must be positive");
  return p.synapse_count * synapse_descriptor_bytes(p, byte_rounding) * p.rate_hz;
}

double workload_total(double rate, double duration) {
  if (rate < 0 || duration < 0) throw Error(ErrorKind::invalid_argument, "rate and duration must be non-negative");
  return rate * duration;
}

double keys_per_second(double device_rate, double cost) {
  if (!(cost > 0)) throw Error(ErrorKind::invalid_argument, "per-key cost must be positive");
  return device_rate / cost;
}

double per_key_cost(double transistors, double bits_per_transistor, double cycles, double units) {
  if (!(units > 0)) throw Error(ErrorKind::invalid_argument, "units must be positive");
  return cycles * transistors * bits_per_transistor / 8.0 / units;
}

bool CapacityReport::agrees(const std::string& key) const {
  auto p = published.find(key);
  auto v = values.find(key);
  if (p == published.end() || v == values.end()) return false;
  const double want = p->second.value, got = v->second;
  if (p->second.order_of_magnitude) return got > 0 && want > 0 && std::fabs(std::log10(got / want)) <= 1.0;
  if (want == 0) return std::fabs(got) <= p->second.tolerance;
  return std::fabs(got - want) <= p->second.tolerance * std::fabs(want);
}

namespace {

SubsystemKind parse_kind(const std::string& s) {
  if (s == "logic") return SubsystemKind::logic;
  if (s == "memory") return SubsystemKind::memory;
  throw Error(ErrorKind::schema, "unknown subsystem kind \"" + s + "\"");
}

SiliconSubsystem parse_subsystem(const json& j) {
  SiliconSubsystem s;
  s.name = j.at("name").get<std::string>();
  s.kind = parse_kind(j.at("kind").get<std::string>());
  s.transistor_count = j.value("transistor_count", 0.0);
  s.bits_per_transistor = j.value("bits_per_transistor", 8.0);
  s.capacity_bytes = j.value("capacity_bytes", 0.0);
  s.clock_hz = j.at("clock_hz").get<double>();
  s.count = j.value("count", 1.0);
  return s;
}

SynapsePopulation parse_population(const json& j) {
  SynapsePopulation p;
  p.synapse_count = j.at("synapse_count").get<double>();
  p.origin_bits = j.value("origin_bits", 0.0);
  p.position_bits = j.value("position_bits", 0.0);
  p.pre_state_bits = j.value("pre_state_bits", 0.0);
  p.post_state_bits = j.value("post_state_bits", 0.0);
  p.timing_bits = j.value("timing_bits", 0.0);
  p.dynamic_complexity_bytes = j.value("dynamic_complexity_bytes", 0.0);
  p.rate_hz = j.at("rate_hz").get<double>();
  if (j.contains("rounded_descriptor_bytes")) p.rounded_descriptor_bytes = j.at("rounded_descriptor_bytes").get<double>();
  return p;
}

void evaluate_silicon(const json& f, CapacityReport& r) {
  std::vector<SiliconSubsystem> subs;
  for (const auto& j : f.at("subsystems")) subs.push_back(parse_subsystem(j));
  std::map<std::string, double> rate_of;
  for (const auto& s : subs) {
    rate_of[s.name] = s.bytes_per_second();
    r.values[s.name] = s.bytes_per_second();
    r.values[s.name + "_bytes"] = s.bytes();
  }
  const double total = silicon_capacity(subs);
  r.values["total_bytes_per_second"] = total;
  r.values["db"] = db_scale(total);
  auto rate = [&](const json& j) {
    if (!j.contains("rate_of")) return total;
    const auto name = j.at("rate_of").get<std::string>();
    auto it = rate_of.find(name);
    if (it == rate_of.end()) throw Error(ErrorKind::schema, "rate_of names unknown subsystem \"" + name + "\"");
    return it->second;
  };
  if (f.contains("reference_year")) {
    const double years = f.at("reference_year").get<double>() - f.value("db_origin_year", 1984.0);
    r.values["db_per_year"] = r.values["db"] / years;
  }
  if (f.contains("fleet")) {
    const auto& fl = f.at("fleet");
    r.values["fleet_total_bytes"] =
        workload_total(fl.at("machines").get<double>() * rate(fl), fl.at("duration_seconds").get<double>());
  }
  if (f.contains("workload")) {
    const auto& w = f.at("workload");
    r.values["workload_total_bytes"] = workload_total(rate(w), w.at("duration_seconds").get<double>());
  }
  if (f.contains("key_search")) {
    const auto& k = f.at("key_search");
    const double cost = per_key_cost(k.at("unit_transistors").get<double>(), k.value("bits_per_transistor", 8.0),
                                     k.at("cycles_per_key").get<double>(), k.at("units_per_chip").get<double>());
    r.values["per_key_bytes"] = cost;
    const double kps = keys_per_second(rate(k), cost);
    r.values["keys_per_second"] = kps;
    if (k.contains("keys_to_search")) r.values["search_hours"] = k.at("keys_to_search").get<double>() / kps / 3600.0;
  }
}

void evaluate_neural(const json& f, CapacityReport& r, bool byte_rounding) {
  const SynapsePopulation p = parse_population(f.at("population"));
  r.values["descriptor_bits"] = synapse_descriptor_bits(p);
  r.values["descriptor_bytes"] = synapse_descriptor_bytes(p, byte_rounding);
  r.values["state_bytes"] = p.synapse_count * synapse_descriptor_bytes(p, byte_rounding);
  r.values["bytes_per_second"] = neural_capacity(p, byte_rounding);
  r.values["db"] = db_scale(r.values["bytes_per_second"]);
}

}  // namespace

CapacityReport evaluate_fixture(const json& f, bool byte_rounding) {
  CapacityReport r;
  try {
    r.name = f.value("name", std::string("unnamed"));
    const auto kind = f.at("kind").get<std::string>();
    if (kind == "silicon") evaluate_silicon(f, r);
    else if (kind == "neural") evaluate_neural(f, r, byte_rounding);
    else throw Error(ErrorKind::schema, "unknown fixture kind \"" + kind + "\"");
    if (f.contains("published")) {
      for (const auto& [key, pj] : f.at("published").items()) {
        Published p;
        if (pj.is_number()) {
          p.value = pj.get<double>();
        } else {
          p.value = pj.at("value").get<double>();
          p.tolerance = pj.value("tolerance", 0.1);
          p.order_of_magnitude = pj.value("order_of_magnitude", false);
          p.discrepancy = pj.value("discrepancy", false);
          p.note = pj.value("note", std::string());
        }
        r.published[key] = p;
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema, std::string("malformed capacity fixture: ") + e.what());
  }
  return r;
}

json report_to_json(const CapacityReport& r) {
  json pub = json::object();
  for (const auto& [k, p] : r.published) {
    json e{{"value", p.value}, {"agrees", r.agrees(k)}};
    if (p.order_of_magnitude) e["order_of_magnitude"] = true;
    else e["tolerance"] = p.tolerance;
    if (p.discrepancy) e["discrepancy"] = true;
    if (!p.note.empty()) e["note"] = p.note;
    pub[k] = e;
  }
  return json{{"format_version", kFormatVersion}, {"name", r.name}, {"values", r.values}, {"published", pub}};
}

std::string report_to_text(const CapacityReport& r) {
  std::ostringstream os;
  os << r.name << '\n';
  os << std::setprecision(3);
  for (const auto& [k, v] : r.values) {
    os << "  " << std::left << std::setw(28) << k << std::right << std::setw(12) << v;
    auto p = r.published.find(k);
    if (p != r.published.end()) {
      os << "   published " << p->second.value;
      if (p->second.discrepancy) os << " (documented discrepancy)";
      else os << (r.agrees(k) ? " ok" : " MISMATCH");
    }
    os << '\n';
  }
  return os.str();
}

std::string report_to_csv(const CapacityReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "fixture,quantity,value,published,agrees\n";
  for (const auto& [k, v] : r.values) {
    os << r.name << ',' << k << ',' << v << ',';
    auto p = r.published.find(k);
    if (p != r.published.end()) os << p->second.value << ',' << (r.agrees(k) ? "true" : "false");
    else os << ',';
    os << '\n';
  }
  return os.str();
}

}  // namespace workfn
