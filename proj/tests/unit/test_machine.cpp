#include "doctest.h"
#include "generators.h"
#include "oracles.h"
#include "workfn/machine.h"
#include "workfn/machine_io.h"
#include "workfn/skip_expansion.h"

using namespace workfn;

namespace {

MachinePtr unary_increment() {
  return load_machine(nlohmann::json::parse(R"({
    "states": ["scan", "done"], "halt_states": ["done"], "symbols": ["_", "1"],
    "tapes": 1, "max_skip": 1, "initial_state": "scan",
    "table": [
      {"state": "scan", "read": ["1"], "write": ["1"], "move": [1], "next": "scan"},
      {"state": "scan", "read": ["_"], "write": ["1"], "move": [0], "next": "done"}
    ]})"));
}

void run_to_halt(Configuration& c, std::uint64_t cap) {
  for (std::uint64_t i = 0; i < cap && c.status == Status::running; ++i) step(c);
}

}  // namespace

TEST_CASE("unary increment appends one mark") {
  auto m = unary_increment();
  Configuration c = Configuration::initial(m);
  const std::vector<Symbol> in{1, 1, 1};
  c.load(0, in);
  run_to_halt(c, 100);
  CHECK(c.status == Status::halted);
  CHECK(c.steps == 4);
  CHECK(c.tapes[0].leased_count() == 4);
  CHECK(c.tapes[0].read_at(3) == 1);
}

TEST_CASE("blank writes on unleased cells lease nothing") {
  Tape t;
  CHECK_FALSE(t.write(5, kBlank));
  CHECK(t.leased_count() == 0);
  CHECK(t.write(5, 1));
  CHECK(t.write(5, kBlank));
  CHECK(t.is_leased(5));
  t.free(5);
  CHECK(t.leased_count() == 0);
}

TEST_CASE("free_cells releases from the head and only on work tapes") {
  auto m = unary_increment();
  Configuration c = Configuration::initial(m);
  const std::vector<Symbol> in{1, 1, 1, 1};
  c.load(0, in);
  c.tapes[0].head = 1;
  free_cells(c, 0, 2);
  CHECK(c.tapes[0].leased_count() == 2);
  CHECK(c.tapes[0].is_leased(0));
  CHECK(c.tapes[0].is_leased(3));
  CHECK_THROWS_AS(free_cells(c, 0, -1), Error);
}

TEST_CASE("partial tables are rejected") {
  auto doc = nlohmann::json::parse(R"({
    "states": ["a", "h"], "halt_states": ["h"], "symbols": ["0", "1"], "tapes": 1, "max_skip": 1, "initial_state": "a",
    "table": [{"state": "a", "read": ["0"], "write": ["1"], "move": [1], "next": "h"}]})");
  try {
    load_machine(doc);
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::schema);
    CHECK(std::string(e.what()).find("partial table") != std::string::npos);
  }
}

TEST_CASE("moves beyond max_skip are rejected") {
  auto doc = nlohmann::json::parse(R"({
    "states": ["a", "h"], "halt_states": ["h"], "symbols": ["0"], "tapes": 1, "max_skip": 1, "initial_state": "a",
    "table": [{"state": "a", "read": ["0"], "write": ["0"], "move": [2], "next": "h"}]})");
  CHECK_THROWS_AS(load_machine(doc), Error);
}

TEST_CASE("machine JSON round-trips") {
  gen::Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    auto m = gen::single_tape(rng, 3, 3, 2);
    auto back = load_machine(machine_to_json(*m));
    REQUIRE(back->entry_count() == m->entry_count());
    for (std::uint64_t e = 0; e < m->entry_count(); ++e) {
      const auto a = m->entry(e), b = back->entry(e);
      CHECK(a.next == b.next);
      CHECK(a.write[0] == b.write[0]);
      CHECK(a.move[0] == b.move[0]);
    }
  }
}

TEST_CASE("step agrees with an independent interpreter") {
  gen::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    auto m = gen::single_tape(rng, 4, 3, 2, 0.1);
    const auto in = gen::word(rng, 5, 3);
    Configuration c = Configuration::initial(m);
    c.load(0, in);
    const auto ref = oracle::run_single_tape(*m, in, 200);
    std::vector<std::size_t> leased;
    for (int s = 0; s < 200 && c.status == Status::running; ++s) {
      step(c);
      leased.push_back(c.tapes[0].leased_count());
    }
    CHECK(leased == ref.leased_after);
    CHECK(c.tapes[0].cells() == std::map<Position, Symbol>(ref.tape.begin(), ref.tape.end()));
  }
}

TEST_CASE("identical starts give identical traces") {
  gen::Rng rng(3);
  auto m = gen::multi_tape(rng, 3, 2, 1, 2);
  Configuration a = Configuration::initial(m), b = Configuration::initial(m);
  for (int s = 0; s < 100 && a.status == Status::running; ++s) {
    step(a);
    step(b);
    CHECK(a.tapes == b.tapes);
    CHECK(a.state == b.state);
  }
}

TEST_CASE("lease count changes only through writes") {
  gen::Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    auto m = gen::multi_tape(rng, 3, 3, 2, 2);
    Configuration c = Configuration::initial(m);
    for (int s = 0; s < 50 && c.status == Status::running; ++s) {
      const auto predicted = leased_after_step(c);
      const std::size_t before = c.tapes[0].leased_count() + c.tapes[1].leased_count();
      const auto effect = step(c);
      const std::size_t after = c.tapes[0].leased_count() + c.tapes[1].leased_count();
      CHECK(after >= before);
      CHECK(after - before <= effect.writes.size());
      CHECK(predicted[0] == c.tapes[0].leased_count());
      CHECK(predicted[1] == c.tapes[1].leased_count());
    }
  }
}

TEST_CASE("a machine whose run-tape cell is unwritten sleeps and wakes") {
  auto m = std::make_shared<MachineSpec>(std::vector<std::string>{"a", "h"}, std::vector<std::string>{"0", "1"},
                                         std::vector<TapeRole>{TapeRole::run}, 1, 0, std::vector<StateId>{1});
  const Symbol r0[1] = {0}, r1[1] = {1};
  const Move mv[1] = {1};
  m->set_action(0, r0, r0, mv, 0);
  m->set_action(0, r1, r1, mv, 1);
  m->finalize();
  Configuration c = Configuration::initial(m);
  CHECK(c.status == Status::sleeping);
  CHECK_FALSE(wake(c));
  c.tapes[0].load(0, 1);
  CHECK(wake(c));
  step(c);
  CHECK(c.status == Status::halted);
}

TEST_CASE("skip expansion preserves the final tape") {
  gen::Rng rng(13);
  int halting = 0;
  for (int i = 0; i < 100; ++i) {
    auto m = gen::single_tape(rng, 3, 3, 3, 0.15);
    auto e = expand_skips(*m);
    CHECK(e->max_skip() == 1);
    const auto in = gen::word(rng, 4, 3);
    const auto a = oracle::run_single_tape(*m, in, 500);
    const auto b = oracle::run_single_tape(*e, in, 5000);
    if (!a.halted) continue;
    ++halting;
    CHECK(b.halted);
    CHECK(a.tape == b.tape);
    CHECK(b.leased_after.size() <= 3 * a.leased_after.size());
    CHECK(e->state_count() <= m->state_count() + 2 * m->state_count() * 2);
  }
  CHECK(halting > 10);
}
