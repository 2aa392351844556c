#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace workfn {

enum class SubsystemKind { logic, memory };

struct SiliconSubsystem {
  std::string name;
  SubsystemKind kind = SubsystemKind::logic;
  double transistor_count = 0;
  double bits_per_transistor = 8;
  double capacity_bytes = 0;
  double clock_hz = 0;
  double count = 1;  // identical units

  double bytes() const;
  double bytes_per_second() const { return bytes() * clock_hz; }
};

double silicon_capacity(const std::vector<SiliconSubsystem>& subsystems);

// 10 log10(rate / 1e12): decibels relative to the original IBM PC.
double db_scale(double bytes_per_second);
double db_to_rate(double db);

struct SynapsePopulation {
  double synapse_count = 0;
  double origin_bits = 0;
  double position_bits = 0;
  double pre_state_bits = 0;
  double post_state_bits = 0;
  double timing_bits = 0;
  double dynamic_complexity_bytes = 0;
  double rate_hz = 0;
  // Byte figure used instead of bits/8 when byte rounding is requested.
  std::optional<double> rounded_descriptor_bytes;
};

double synapse_descriptor_bits(const SynapsePopulation& p);
double synapse_descriptor_bytes(const SynapsePopulation& p, bool byte_rounding);
double neural_capacity(const SynapsePopulation& p, bool byte_rounding = false);

double workload_total(double bytes_per_second, double duration_seconds);
double keys_per_second(double device_rate, double per_key_cost);
// Transistor-bytes of a search unit times its cycles per key, spread over
// the units sharing those transistors.
double per_key_cost(double transistors, double bits_per_transistor, double cycles, double units);

struct Published {
  double value = 0;
  double tolerance = 0.1;      // relative
  bool order_of_magnitude = false;
  bool discrepancy = false;    // known inconsistency, reported but not checked
  std::string note;
};

struct CapacityReport {
  std::string name;
  std::map<std::string, double> values;
  std::map<std::string, Published> published;

  // True if value and published agree within the declared tolerance.
  bool agrees(const std::string& key) const;
};

// Evaluates a case-study fixture: {"kind": "silicon" | "neural", ...}.
CapacityReport evaluate_fixture(const nlohmann::json& fixture, bool byte_rounding = false);
nlohmann::json report_to_json(const CapacityReport& r);
std::string report_to_text(const CapacityReport& r);
std::string report_to_csv(const CapacityReport& r);

}  // namespace workfn
