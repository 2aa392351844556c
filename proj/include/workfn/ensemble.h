#pragma once

#include <cstddef>
#include <optional>
#include <tuple>
#include <vector>

#include "workfn/cost.h"
#include "workfn/machine.h"

namespace workfn {

// `length` cells of machine_a's tape_a starting at start_a are the same
// physical cells as machine_b's tape_b starting at start_b.
struct CellAlias {
  std::size_t machine_a = 0;
  std::size_t tape_a = 0;
  Position start_a = 0;
  std::size_t machine_b = 0;
  std::size_t tape_b = 0;
  Position start_b = 0;
  std::size_t length = 0;
};

struct Overlap {
  std::size_t my_tape = 0;
  Position my_start = 0;
  std::size_t other_machine = 0;
  std::size_t other_tape = 0;
  Position other_start = 0;
  std::size_t length = 0;
};

// What a System writes on the run tape to obtain a daughter machine.
struct RecruitmentRequest {
  MachinePtr machine;
  std::optional<StateId> initial_state;
  // Initial work-tape contents, loaded from cell 0; keyed by tape index.
  std::vector<std::pair<std::size_t, std::vector<Symbol>>> work_tapes;
  // Head positions per tape; empty means all heads at 0 (run and valuation
  // heads are copied from the parent regardless).
  std::vector<Position> heads;
  std::vector<Overlap> overlaps;
  CostOptions cost;
};

// Machines stepping in deterministic lockstep. Within a tick every awake
// machine executes one step; writes to aliased cells become visible to the
// other side after the tick. Any number of machines may read a shared cell
// in a tick, but two machines changing the same shared cell in one tick is
// an Error(conflict).
class Ensemble {
 public:
  std::size_t add(Configuration config, CostOptions options = {});
  void alias(const CellAlias& a);

  // Adds a daughter with private copies of the parent's run and valuation
  // tapes and the declared overlaps aliased into existing machines.
  std::size_t recruit(std::size_t parent, const RecruitmentRequest& request);

  // Returns the ids of the machines that stepped.
  std::vector<std::size_t> tick();
  std::uint64_t ticks() const { return ticks_; }

  std::size_t size() const { return members_.size(); }
  Configuration& config(std::size_t id) { return members_.at(id).config; }
  const Configuration& config(std::size_t id) const { return members_.at(id).config; }
  const CostLedger& ledger(std::size_t id) const { return members_.at(id).ledger; }
  const CostModel& model(std::size_t id) const { return members_.at(id).model; }
  const std::vector<CellAlias>& aliases() const { return aliases_; }

  std::vector<MachineCost> costs() const;
  // One region per alias, charged at the narrower cell width of its two sides.
  std::vector<SharedRegion> shared_regions() const;
  double total_cost() const;

 private:
  struct Member {
    Configuration config;
    CostModel model;
    CostLedger ledger;
  };
  struct Cell {
    std::size_t machine;
    std::size_t tape;
    Position pos;
    bool operator<(const Cell& o) const {
      return std::tie(machine, tape, pos) < std::tie(o.machine, o.tape, o.pos);
    }
    bool operator==(const Cell&) const = default;
  };
  std::vector<Cell> equivalent_cells(const Cell& c) const;

  std::vector<Member> members_;
  std::vector<CellAlias> aliases_;
  std::uint64_t ticks_ = 0;
};

}  // namespace workfn
