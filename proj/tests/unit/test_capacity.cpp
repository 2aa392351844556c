#include <cmath>
#include <string>

#include "doctest.h"
#include "workfn/capacity.h"
#include "workfn/machine_io.h"

using namespace workfn;

namespace {

CapacityReport fixture(const std::string& name, bool rounding = false) {
  return evaluate_fixture(read_json_file(std::string(WORKFN_DATA_DIR) + "/capacity/" + name + ".json"), rounding);
}

}  // namespace

TEST_CASE("logic counts 8 bits per transistor, memory counts its bytes") {
  SiliconSubsystem logic{"l", SubsystemKind::logic, 1000, 8, 0, 10, 2};
  SiliconSubsystem mem{"m", SubsystemKind::memory, 0, 8, 500, 4, 1};
  CHECK(logic.bytes_per_second() == 1000.0 * 10 * 2);
  CHECK(mem.bytes_per_second() == 2000);
  CHECK(silicon_capacity({logic, mem}) == 22000);
}

TEST_CASE("capacity is additive and scales with the clock") {
  SiliconSubsystem a{"a", SubsystemKind::logic, 12345, 8, 0, 3e6, 1};
  SiliconSubsystem b{"b", SubsystemKind::memory, 0, 8, 6e5, 7e5, 3};
  CHECK(silicon_capacity({a, b}) == doctest::Approx(silicon_capacity({a}) + silicon_capacity({b})));
  SiliconSubsystem a2 = a, b2 = b;
  a2.clock_hz *= 2.5;
  b2.clock_hz *= 2.5;
  CHECK(silicon_capacity({a2, b2}) == doctest::Approx(2.5 * silicon_capacity({a, b})));
  CHECK_THROWS_AS(silicon_capacity({}), Error);
}

TEST_CASE("dB scale round-trips") {
  CHECK(db_scale(1e12) == 0);
  CHECK(db_scale(1e18) == doctest::Approx(60));
  for (double r : {3.3e7, 1e12, 4.5e17, 2e21}) CHECK(db_to_rate(db_scale(r)) == doctest::Approx(r).epsilon(1e-9));
  CHECK_THROWS_AS(db_scale(0), Error);
}

TEST_CASE("synapse descriptors") {
  SynapsePopulation p;
  p.synapse_count = 10;
  p.origin_bits = 20;
  p.position_bits = 13;
  p.pre_state_bits = 8;
  p.post_state_bits = 8;
  p.timing_bits = 4;
  p.rate_hz = 2;
  CHECK(synapse_descriptor_bits(p) == 53);
  CHECK(neural_capacity(p) == 10 * 53.0 / 8 * 2);
  p.rounded_descriptor_bytes = 6;
  CHECK(neural_capacity(p, true) == 10 * 6 * 2);
  CHECK(neural_capacity(p, false) == 10 * 53.0 / 8 * 2);
}

TEST_CASE("per-key cost spreads a search unit over its siblings") {
  CHECK(per_key_cost(1e4, 8, 16, 24) == doctest::Approx(16 * 1e4 / 24));
  CHECK(keys_per_second(3e15, 6.7e3) == doctest::Approx(4.48e11).epsilon(0.01));
}

TEST_CASE("desktop and GPU fixtures") {
  const auto amd = fixture("amd64_x2");
  CHECK(amd.values.at("cpu_cores") == doctest::Approx(3e17));
  CHECK(amd.values.at("ram") == doctest::Approx(8e17));
  for (const auto& k : {"cpu_cores", "ram", "total_bytes_per_second", "db", "db_per_year"}) CHECK(amd.agrees(k));
  CHECK(fixture("geforce_8800gt").agrees("gpu"));
}

TEST_CASE("Pentium II fleet and key search") {
  const auto p = fixture("pentium_ii_1998");
  for (const auto& [k, pub] : p.published) CHECK_MESSAGE(p.agrees(k), k);
  CHECK(p.values.at("search_hours") < 30);
}

TEST_CASE("DES cracker logic and workload; memory figure is flagged") {
  const auto d = fixture("eff_des_cracker");
  CHECK(d.agrees("chips"));
  CHECK(d.agrees("workload_total_bytes"));
  CHECK(d.published.at("chip_memory").discrepancy);
  CHECK_FALSE(d.agrees("chip_memory"));
}

TEST_CASE("neural fixtures under byte rounding") {
  for (const auto& name : {"human_brain_static", "human_brain_dynamic", "human_neuron", "c_elegans"}) {
    const auto r = fixture(name, true);
    for (const auto& [k, pub] : r.published) CHECK_MESSAGE(r.agrees(k), name << "." << k);
  }
  const double ratio =
      fixture("human_neuron", true).values.at("bytes_per_second") / fixture("c_elegans", true).values.at("bytes_per_second");
  CHECK(ratio == doctest::Approx(6).epsilon(0.2));
}

TEST_CASE("exact descriptor bits put the human neuron just outside 10 percent") {
  const auto r = fixture("human_neuron", false);
  CHECK(r.values.at("bytes_per_second") == doctest::Approx(1e4 * 53.0 / 8 * 500));
  CHECK_FALSE(r.agrees("bytes_per_second"));
}

TEST_CASE("malformed fixtures are schema errors") {
  try {
    evaluate_fixture(nlohmann::json::parse(R"({"kind": "silicon"})"));
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::schema);
  }
  CHECK_THROWS_AS(evaluate_fixture(nlohmann::json::parse(R"({"kind": "quantum"})")), Error);
}

TEST_CASE("reports render in every format") {
  const auto d = fixture("eff_des_cracker");
  CHECK(report_to_json(d).at("values").contains("chips"));
  CHECK(report_to_text(d).find("documented discrepancy") != std::string::npos);
  CHECK(report_to_csv(d).rfind("fixture,quantity,value,published,agrees\n", 0) == 0);
}
