#include "workfn/ensemble.h"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace workfn {

std::size_t Ensemble::add(Configuration config, CostOptions options) {
  CostModel model(*config.machine, options);
  members_.push_back(Member{std::move(config), std::move(model), CostLedger{}});
  return members_.size() - 1;
}

void Ensemble::alias(const CellAlias& a) {
  if (a.machine_a >= members_.size() || a.machine_b >= members_.size())
    throw Error(ErrorKind::invalid_argument, "alias references an unknown machine");
  const auto& ca = members_[a.machine_a].config;
  const auto& cb = members_[a.machine_b].config;
  if (a.tape_a >= ca.tapes.size() || a.tape_b >= cb.tapes.size())
    throw Error(ErrorKind::invalid_argument, "alias references an unknown tape");
  if (ca.machine->tape_role(a.tape_a) != TapeRole::work || cb.machine->tape_role(a.tape_b) != TapeRole::work)
    throw Error(ErrorKind::invalid_argument, "only work tapes can overlap");
  if (a.machine_a == a.machine_b && a.tape_a == a.tape_b)
    throw Error(ErrorKind::invalid_argument, "a tape cannot overlap itself");
  aliases_.push_back(a);
}

std::size_t Ensemble::recruit(std::size_t parent, const RecruitmentRequest& request) {
  if (parent >= members_.size()) throw Error(ErrorKind::invalid_argument, "unknown parent machine");
  if (!request.machine) throw Error(ErrorKind::invalid_argument, "recruitment needs a machine");
  for (const auto& o : request.overlaps) {
    if (o.other_machine >= members_.size())
      throw Error(ErrorKind::invalid_argument, "overlap references nonexistent machine " + std::to_string(o.other_machine));
    if (o.other_tape >= members_[o.other_machine].config.tapes.size() || o.my_tape >= request.machine->tape_count())
      throw Error(ErrorKind::invalid_argument, "overlap references a nonexistent tape");
  }

  Configuration daughter = Configuration::initial(request.machine);
  if (request.initial_state) {
    if (*request.initial_state >= request.machine->state_count())
      throw Error(ErrorKind::invalid_argument, "initial state out of range");
    daughter.state = *request.initial_state;
  }
  for (const auto& [tape, cells] : request.work_tapes) {
    if (tape >= daughter.tapes.size() || request.machine->tape_role(tape) != TapeRole::work)
      throw Error(ErrorKind::invalid_argument, "work-tape contents name a non-work tape");
    daughter.load(tape, cells);
  }
  if (!request.heads.empty()) {
    if (request.heads.size() != daughter.tapes.size())
      throw Error(ErrorKind::invalid_argument, "need one head position per tape");
    for (std::size_t i = 0; i < daughter.tapes.size(); ++i) daughter.tapes[i].head = request.heads[i];
  }
  const Configuration& pc = members_[parent].config;
  if (auto rt = request.machine->run_tape(), prt = pc.machine->run_tape(); rt && prt)
    daughter.tapes[*rt] = pc.tapes[*prt];
  if (auto vt = request.machine->valuation_tape(), pvt = pc.machine->valuation_tape(); vt && pvt)
    daughter.tapes[*vt] = pc.tapes[*pvt];

  daughter.status = request.machine->is_halt(daughter.state) ? Status::halted : Status::running;
  if (daughter.status == Status::running) {
    if (auto rt = request.machine->run_tape(); rt && !daughter.tapes[*rt].is_leased(daughter.tapes[*rt].head))
      daughter.status = Status::sleeping;
  }

  const std::size_t id = add(std::move(daughter), request.cost);
  for (const auto& o : request.overlaps) {
    alias(CellAlias{id, o.my_tape, o.my_start, o.other_machine, o.other_tape, o.other_start, o.length});
    // The daughter starts out seeing what is already in the shared cells.
    const Tape& src = members_[o.other_machine].config.tapes[o.other_tape];
    Tape& dst = members_[id].config.tapes[o.my_tape];
    for (std::size_t i = 0; i < o.length; ++i) {
      const Position sp = o.other_start + static_cast<Position>(i);
      const Position dp = o.my_start + static_cast<Position>(i);
      if (src.is_leased(sp)) dst.load(dp, src.read_at(sp));
      else dst.free(dp);
    }
  }
  return id;
}

std::vector<Ensemble::Cell> Ensemble::equivalent_cells(const Cell& start) const {
  std::vector<Cell> out{start};
  std::set<Cell> seen{start};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Cell c = out[i];
    for (const auto& a : aliases_) {
      std::optional<Cell> other;
      if (a.machine_a == c.machine && a.tape_a == c.tape && c.pos >= a.start_a &&
          c.pos < a.start_a + static_cast<Position>(a.length))
        other = Cell{a.machine_b, a.tape_b, a.start_b + (c.pos - a.start_a)};
      else if (a.machine_b == c.machine && a.tape_b == c.tape && c.pos >= a.start_b &&
               c.pos < a.start_b + static_cast<Position>(a.length))
        other = Cell{a.machine_a, a.tape_a, a.start_a + (c.pos - a.start_b)};
      if (other && seen.insert(*other).second) out.push_back(*other);
    }
  }
  return out;
}

std::vector<std::size_t> Ensemble::tick() {
  std::vector<std::size_t> stepped;
  std::vector<std::pair<std::size_t, CellWrite>> writes;
  for (std::size_t id = 0; id < members_.size(); ++id) {
    Configuration& c = members_[id].config;
    if (c.status == Status::sleeping) wake(c);
    if (c.status != Status::running) continue;
    const StepEffect effect = step(c);
    stepped.push_back(id);
    for (const auto& w : effect.writes) writes.emplace_back(id, w);
  }

  if (!aliases_.empty()) {
    // Single writer per shared cell per tick, checked after everyone stepped
    // so the outcome does not depend on the stepping order.
    std::map<Cell, std::size_t> writer;
    std::vector<std::pair<std::vector<Cell>, Symbol>> propagate;
    for (const auto& [id, w] : writes) {
      auto cells = equivalent_cells(Cell{id, w.tape, w.position});
      if (cells.size() == 1) continue;
      const Cell root = *std::min_element(cells.begin(), cells.end());
      auto [it, inserted] = writer.emplace(root, id);
      if (!inserted && it->second != id)
        throw Error(ErrorKind::conflict, "machines " + std::to_string(it->second) + " and " + std::to_string(id) +
                                             " wrote the same shared cell in one tick");
      propagate.emplace_back(std::move(cells), w.symbol);
    }
    for (const auto& [cells, symbol] : propagate)
      for (std::size_t i = 1; i < cells.size(); ++i)
        members_[cells[i].machine].config.tapes[cells[i].tape].load(cells[i].pos, symbol);
  }

  for (std::size_t id : stepped) {
    Member& m = members_[id];
    m.ledger.charge(m.config.steps, m.model.information(m.config));
  }
  ++ticks_;
  return stepped;
}

std::vector<MachineCost> Ensemble::costs() const {
  std::vector<MachineCost> out;
  for (std::size_t id = 0; id < members_.size(); ++id)
    out.push_back(MachineCost{id, members_[id].ledger.total_bits(), members_[id].ledger.step_count()});
  return out;
}

std::vector<SharedRegion> Ensemble::shared_regions() const {
  std::vector<SharedRegion> out;
  for (const auto& a : aliases_) {
    const double bits = std::min(members_[a.machine_a].model.cell_bits(a.tape_a), members_[a.machine_b].model.cell_bits(a.tape_b));
    out.push_back(SharedRegion{a.length, bits, {a.machine_a, a.machine_b}});
  }
  return out;
}

double Ensemble::total_cost() const {
  const auto c = costs();
  const auto r = shared_regions();
  return ensemble_cost(c, r);
}

}  // namespace workfn
