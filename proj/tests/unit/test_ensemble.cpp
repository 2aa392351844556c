#include "doctest.h"
#include "workfn/ensemble.h"

using namespace workfn;

namespace {

// One work tape over {0,1,2}: writes `mark` at the head, moves right, halts.
MachinePtr writer(Symbol mark) {
  auto m = std::make_shared<MachineSpec>(std::vector<std::string>{"w", "h"}, std::vector<std::string>{"0", "1", "2"},
                                         std::vector<TapeRole>{TapeRole::work}, 1, 0, std::vector<StateId>{1});
  for (Symbol s = 0; s < 3; ++s) {
    const Symbol r[1] = {s}, w[1] = {mark};
    const Move mv[1] = {1};
    m->set_action(0, r, w, mv, 1);
  }
  m->finalize();
  return m;
}

// Copies the symbol under its head into its halt state's name: waits one
// step, then halts in state r<symbol>.
MachinePtr reader() {
  auto m = std::make_shared<MachineSpec>(std::vector<std::string>{"wait", "look", "r0", "r1", "r2"},
                                         std::vector<std::string>{"0", "1", "2"}, std::vector<TapeRole>{TapeRole::work}, 1, 0,
                                         std::vector<StateId>{2, 3, 4});
  for (Symbol s = 0; s < 3; ++s) {
    const Symbol r[1] = {s};
    const Move stay[1] = {0};
    m->set_action(0, r, r, stay, 1);
    m->set_action(1, r, r, stay, static_cast<StateId>(2 + s));
  }
  m->finalize();
  return m;
}

}  // namespace

TEST_CASE("writes through an alias become visible after the tick") {
  Ensemble e;
  const auto a = e.add(Configuration::initial(writer(2)));
  const auto b = e.add(Configuration::initial(reader()));
  e.alias(CellAlias{a, 0, 0, b, 0, 0, 1});
  e.tick();
  CHECK(e.config(b).tapes[0].read_at(0) == 2);
  e.tick();
  CHECK(e.config(b).state == 4);
}

TEST_CASE("two machines writing one shared cell in a tick conflict") {
  Ensemble e;
  const auto a = e.add(Configuration::initial(writer(1)));
  const auto b = e.add(Configuration::initial(writer(2)));
  e.alias(CellAlias{a, 0, 0, b, 0, 0, 1});
  try {
    e.tick();
    FAIL("expected a conflict");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::conflict);
  }
}

TEST_CASE("aliases chain transitively") {
  Ensemble e;
  const auto a = e.add(Configuration::initial(writer(1)));
  const auto b = e.add(Configuration::initial(reader()));
  const auto c = e.add(Configuration::initial(reader()));
  e.alias(CellAlias{a, 0, 0, b, 0, 0, 1});
  e.alias(CellAlias{b, 0, 0, c, 0, 0, 1});
  e.tick();
  CHECK(e.config(c).tapes[0].read_at(0) == 1);
}

TEST_CASE("independent machines cost the sum of their ledgers") {
  Ensemble e;
  const auto a = e.add(Configuration::initial(writer(1)));
  const auto b = e.add(Configuration::initial(reader()));
  for (int i = 0; i < 3; ++i) e.tick();
  CHECK(e.total_cost() == e.ledger(a).total_bits() + e.ledger(b).total_bits());
}

TEST_CASE("shared cells are charged to the machine with most steps") {
  Ensemble e;
  const auto a = e.add(Configuration::initial(writer(1)));
  const auto b = e.add(Configuration::initial(reader()));
  e.alias(CellAlias{a, 0, 0, b, 0, 0, 1});
  for (int i = 0; i < 3; ++i) e.tick();
  CHECK(e.ledger(a).step_count() == 1);
  CHECK(e.ledger(b).step_count() == 2);
  const auto regions = e.shared_regions();
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].bits_per_cell == 2);
  CHECK(e.total_cost() == e.ledger(a).total_bits() + e.ledger(b).total_bits() - 1 * 2 * 1);
}

TEST_CASE("recruiting copies the run tape and syncs overlaps") {
  auto parent_machine = std::make_shared<MachineSpec>(
      std::vector<std::string>{"p", "h"}, std::vector<std::string>{"0", "1", "2"},
      std::vector<TapeRole>{TapeRole::run, TapeRole::work}, 1, 0, std::vector<StateId>{1});
  for (Symbol s = 0; s < 3; ++s)
    for (Symbol t = 0; t < 3; ++t) {
      const Symbol r[2] = {s, t};
      const Move mv[2] = {0, 0};
      parent_machine->set_action(0, r, r, mv, 1);
    }
  parent_machine->finalize();
  Configuration pc = Configuration::initial(parent_machine);
  pc.tapes[0].load(0, 2);
  pc.tapes[1].load(3, 1);
  pc.status = Status::running;
  Ensemble e;
  const auto p = e.add(pc);

  auto daughter_machine = std::make_shared<MachineSpec>(
      std::vector<std::string>{"d", "h"}, std::vector<std::string>{"0", "1", "2"},
      std::vector<TapeRole>{TapeRole::run, TapeRole::work}, 1, 0, std::vector<StateId>{1});
  for (Symbol s = 0; s < 3; ++s)
    for (Symbol t = 0; t < 3; ++t) {
      const Symbol r[2] = {s, t};
      const Move mv[2] = {0, 0};
      daughter_machine->set_action(0, r, r, mv, 1);
    }
  daughter_machine->finalize();

  RecruitmentRequest req;
  req.machine = daughter_machine;
  req.work_tapes = {{1, {2, 2}}};
  req.overlaps = {Overlap{1, 5, p, 1, 3, 1}};
  const auto d = e.recruit(p, req);
  CHECK(e.config(d).tapes[0].read_at(0) == 2);
  CHECK(e.config(d).tapes[1].read_at(0) == 2);
  CHECK(e.config(d).tapes[1].read_at(5) == 1);
  CHECK(e.aliases().size() == 1);

  RecruitmentRequest bad = req;
  bad.overlaps = {Overlap{1, 0, 99, 0, 0, 1}};
  CHECK_THROWS_AS(e.recruit(p, bad), Error);
}

TEST_CASE("aliases must join work tapes that exist") {
  Ensemble e;
  const auto a = e.add(Configuration::initial(writer(1)));
  CHECK_THROWS_AS(e.alias(CellAlias{a, 0, 0, 7, 0, 0, 1}), Error);
  CHECK_THROWS_AS(e.alias(CellAlias{a, 0, 0, a, 0, 4, 1}), Error);
}
