#include "workfn/machine.h"

#include <algorithm>
#include <limits>
#include <sstream>

namespace workfn {

namespace {

constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 28;

[[noreturn]] void schema_error(const std::string& msg) { throw Error(ErrorKind::schema, msg); }

}  // namespace

const char* to_string(TapeRole role) {
  switch (role) {
    case TapeRole::work: return "work";
    case TapeRole::run: return "run";
    case TapeRole::valuation: return "valuation";
  }
  return "?";
}

const char* to_string(Status status) {
  switch (status) {
    case Status::running: return "running";
    case Status::sleeping: return "sleeping";
    case Status::halted: return "halted";
    case Status::budget_exceeded: return "budget_exceeded";
  }
  return "?";
}

double FastAccumulator::logic_bits(unsigned value_bits) {
  // 3A-1 register bits plus 16(A-1) bits of full-adder truth tables.
  return 19.0 * value_bits - 17.0;
}

MachineSpec::MachineSpec(std::vector<std::string> state_names,
                         std::vector<std::string> symbol_names,
                         std::vector<TapeRole> tape_roles, Move max_skip,
                         StateId initial_state, std::vector<StateId> halt_states)
    : state_names_(std::move(state_names)),
      symbol_names_(std::move(symbol_names)),
      roles_(std::move(tape_roles)),
      max_skip_(max_skip),
      initial_(initial_state) {
  if (state_names_.empty()) schema_error("machine needs at least one state");
  if (symbol_names_.empty()) schema_error("machine needs at least one symbol");
  if (roles_.empty()) schema_error("machine needs at least one tape");
  if (max_skip_ < 0) schema_error("max_skip must be non-negative");
  if (initial_ >= state_names_.size()) schema_error("initial state out of range");
  if (std::count(roles_.begin(), roles_.end(), TapeRole::run) > 1)
    schema_error("at most one run tape");
  if (std::count(roles_.begin(), roles_.end(), TapeRole::valuation) > 1)
    schema_error("at most one valuation tape");

  halt_.assign(state_names_.size(), false);
  for (StateId h : halt_states) {
    if (h >= state_names_.size()) schema_error("halt state out of range");
    if (!halt_[h]) halt_list_.push_back(h);
    halt_[h] = true;
  }
  std::sort(halt_list_.begin(), halt_list_.end());

  const std::uint64_t n = symbol_names_.size();
  for (std::size_t i = 0; i < roles_.size(); ++i) {
    if (per_state_ > kMaxEntries / n) schema_error("action table too large");
    per_state_ *= n;
  }
  if (per_state_ > kMaxEntries / state_names_.size()) schema_error("action table too large");
  const std::uint64_t entries = per_state_ * state_names_.size();
  const std::size_t t = roles_.size();
  writes_.assign(entries * t, 0);
  moves_.assign(entries * t, 0);
  next_.assign(entries, 0);
  defined_.assign(entries, false);
  tape_alphabet_.assign(t, static_cast<Symbol>(n));
}

std::uint64_t MachineSpec::index_of(StateId state, std::span<const Symbol> read) const {
  std::uint64_t idx = state;
  const std::uint64_t n = symbol_names_.size();
  for (Symbol s : read) idx = idx * n + s;
  return idx;
}

void MachineSpec::set_action(StateId state, std::span<const Symbol> read,
                             std::span<const Symbol> write,
                             std::span<const Move> move, StateId next) {
  const std::size_t t = roles_.size();
  if (state >= state_count()) schema_error("action state out of range");
  if (read.size() != t || write.size() != t || move.size() != t)
    schema_error("action vectors must have one component per tape");
  for (std::size_t i = 0; i < t; ++i) {
    if (read[i] >= symbol_count()) schema_error("read symbol out of range");
    if (write[i] >= symbol_count()) schema_error("write symbol out of range");
    if (move[i] < -max_skip_ || move[i] > max_skip_) {
      std::ostringstream os;
      os << "move " << move[i] << " out of range [-" << max_skip_ << ", " << max_skip_ << "]";
      schema_error(os.str());
    }
  }
  if (next >= state_count()) schema_error("next state out of range");
  const std::uint64_t idx = index_of(state, read);
  if (defined_[idx]) schema_error("duplicate action for state " + state_names_[state]);
  std::copy(write.begin(), write.end(), writes_.begin() + idx * t);
  std::copy(move.begin(), move.end(), moves_.begin() + idx * t);
  next_[idx] = next;
  defined_[idx] = true;
}

void MachineSpec::set_tape_alphabet(std::size_t tape, Symbol limit) {
  if (tape >= roles_.size()) schema_error("tape index out of range");
  if (limit == 0 || limit > symbol_count()) schema_error("tape alphabet out of range");
  tape_alphabet_[tape] = limit;
}

void MachineSpec::attach_accumulator(const FastAccumulator& acc) {
  if (acc.trigger_state >= state_count() || acc.next_state >= state_count())
    schema_error("accumulator state out of range");
  if (acc.source_tape >= tape_count() || acc.target_tape >= tape_count())
    schema_error("accumulator tape out of range");
  if (acc.value_bits == 0 || acc.value_bits > 32) schema_error("accumulator width out of range");
  accumulator_ = acc;
}

void MachineSpec::finalize() {
  const std::size_t t = roles_.size();
  std::vector<Symbol> read(t);
  for (std::uint64_t idx = 0; idx < next_.size(); ++idx) {
    StateId state;
    decode_entry(idx, state, read);
    if (!defined_[idx]) {
      if (!halt_[state]) {
        std::ostringstream os;
        os << "partial table: no action for state " << state_names_[state] << " reading [";
        for (std::size_t i = 0; i < t; ++i) os << (i ? "," : "") << symbol_names_[read[i]];
        os << "]";
        schema_error(os.str());
      }
      std::copy(read.begin(), read.end(), writes_.begin() + idx * t);
      std::fill(moves_.begin() + idx * t, moves_.begin() + (idx + 1) * t, 0);
      next_[idx] = state;
      defined_[idx] = true;
      continue;
    }
    if (halt_[state]) continue;
    bool reachable = true;
    for (std::size_t i = 0; i < t; ++i)
      if (read[i] >= tape_alphabet_[i]) reachable = false;
    for (std::size_t i = 0; i < t; ++i) {
      const Symbol w = writes_[idx * t + i];
      const Move mv = moves_[idx * t + i];
      if (roles_[i] == TapeRole::valuation && w != read[i])
        schema_error("valuation tape is read-only (state " + state_names_[state] + ")");
      if (roles_[i] == TapeRole::run && mv < 0)
        schema_error("run tape head cannot move backwards (state " + state_names_[state] + ")");
      if (reachable && w >= tape_alphabet_[i])
        schema_error("write escapes the alphabet of tape " + std::to_string(i));
    }
  }
}

MachineSpec::Action MachineSpec::entry(std::uint64_t index) const {
  const std::size_t t = roles_.size();
  return Action{std::span<const Symbol>(writes_.data() + index * t, t),
                std::span<const Move>(moves_.data() + index * t, t), next_[index]};
}

MachineSpec::Action MachineSpec::action(StateId state, std::span<const Symbol> read) const {
  return entry(index_of(state, read));
}

void MachineSpec::decode_entry(std::uint64_t index, StateId& state, std::vector<Symbol>& read) const {
  const std::size_t t = roles_.size();
  const std::uint64_t n = symbol_names_.size();
  read.resize(t);
  std::uint64_t rest = index;
  for (std::size_t i = t; i-- > 0;) {
    read[i] = static_cast<Symbol>(rest % n);
    rest /= n;
  }
  state = static_cast<StateId>(rest);
}

std::optional<std::size_t> MachineSpec::run_tape() const {
  for (std::size_t i = 0; i < roles_.size(); ++i)
    if (roles_[i] == TapeRole::run) return i;
  return std::nullopt;
}

std::optional<std::size_t> MachineSpec::valuation_tape() const {
  for (std::size_t i = 0; i < roles_.size(); ++i)
    if (roles_[i] == TapeRole::valuation) return i;
  return std::nullopt;
}

std::size_t MachineSpec::work_tape_count() const {
  return static_cast<std::size_t>(std::count(roles_.begin(), roles_.end(), TapeRole::work));
}

std::optional<StateId> MachineSpec::find_state(const std::string& name) const {
  auto it = std::find(state_names_.begin(), state_names_.end(), name);
  if (it == state_names_.end()) return std::nullopt;
  return static_cast<StateId>(it - state_names_.begin());
}

std::optional<Symbol> MachineSpec::find_symbol(const std::string& name) const {
  auto it = std::find(symbol_names_.begin(), symbol_names_.end(), name);
  if (it == symbol_names_.end()) return std::nullopt;
  return static_cast<Symbol>(it - symbol_names_.begin());
}

Symbol Tape::read_at(Position pos) const {
  auto it = cells_.find(pos);
  return it == cells_.end() ? kBlank : it->second;
}

bool Tape::write(Position pos, Symbol symbol) {
  auto it = cells_.find(pos);
  if (it == cells_.end()) {
    if (symbol == kBlank) return false;
    cells_.emplace(pos, symbol);
    return true;
  }
  if (it->second == symbol) return false;
  it->second = symbol;
  return true;
}

bool Tape::load(Position pos, Symbol symbol) {
  auto [it, inserted] = cells_.try_emplace(pos, symbol);
  if (inserted) return true;
  if (it->second == symbol) return false;
  it->second = symbol;
  return true;
}

void Tape::free(Position pos) { cells_.erase(pos); }

Configuration Configuration::initial(MachinePtr machine) {
  Configuration c;
  c.state = machine->initial_state();
  c.tapes.resize(machine->tape_count());
  c.machine = std::move(machine);
  c.status = c.machine->is_halt(c.state) ? Status::halted : Status::running;
  if (c.status == Status::running) {
    if (auto rt = c.machine->run_tape(); rt && !c.tapes[*rt].is_leased(c.tapes[*rt].head))
      c.status = Status::sleeping;
  }
  return c;
}

void Configuration::load(std::size_t tape, std::span<const Symbol> cells, Position origin) {
  if (tape >= tapes.size()) throw Error(ErrorKind::invalid_argument, "tape index out of range");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] >= machine->symbol_count())
      throw Error(ErrorKind::invalid_argument, "tape symbol out of range");
    tapes[tape].load(origin + static_cast<Position>(i), cells[i]);
  }
}

namespace {

bool run_cell_unwritten(const Configuration& c) {
  auto rt = c.machine->run_tape();
  return rt && !c.tapes[*rt].is_leased(c.tapes[*rt].head);
}

}  // namespace

StepEffect step(Configuration& config) {
  if (config.status != Status::running)
    throw Error(ErrorKind::invalid_argument,
                std::string("step refused: configuration is ") + to_string(config.status));
  const MachineSpec& spec = *config.machine;
  StepEffect effect;

  if (const auto& acc = spec.accumulator(); acc && config.state == acc->trigger_state) {
    Tape& src = config.tapes[acc->source_tape];
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < acc->inputs; ++i)
      sum += from_twos_complement(src.read_at(src.head + static_cast<Position>(i)), acc->value_bits);
    src.head += static_cast<Position>(acc->inputs);
    config.tapes[acc->target_tape].head += acc->stride * sum;
    config.state = acc->next_state;
  } else {
    const std::size_t t = spec.tape_count();
    Symbol read_buf[8];
    std::vector<Symbol> read_vec;
    std::span<Symbol> read;
    if (t <= 8) {
      read = std::span<Symbol>(read_buf, t);
    } else {
      read_vec.resize(t);
      read = read_vec;
    }
    for (std::size_t i = 0; i < t; ++i) read[i] = config.tapes[i].read();
    const auto act = spec.action(config.state, read);
    for (std::size_t i = 0; i < t; ++i) {
      Tape& tape = config.tapes[i];
      if (tape.write(tape.head, act.write[i]))
        effect.writes.push_back(CellWrite{i, tape.head, act.write[i]});
      tape.head += act.move[i];
    }
    config.state = act.next;
  }

  ++config.steps;
  if (spec.is_halt(config.state)) {
    config.status = Status::halted;
  } else if (run_cell_unwritten(config)) {
    config.status = Status::sleeping;
  }
  return effect;
}

std::vector<std::size_t> leased_after_step(const Configuration& config) {
  const MachineSpec& spec = *config.machine;
  std::vector<std::size_t> counts(config.tapes.size());
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] = config.tapes[i].leased_count();
  if (const auto& acc = spec.accumulator(); acc && config.state == acc->trigger_state) return counts;
  std::vector<Symbol> read(spec.tape_count());
  for (std::size_t i = 0; i < read.size(); ++i) read[i] = config.tapes[i].read();
  const auto act = spec.action(config.state, read);
  for (std::size_t i = 0; i < read.size(); ++i) {
    const Tape& tape = config.tapes[i];
    if (!tape.is_leased(tape.head) && act.write[i] != kBlank) ++counts[i];
  }
  return counts;
}

bool wake(Configuration& config) {
  if (config.status == Status::sleeping && !run_cell_unwritten(config)) config.status = Status::running;
  return config.status == Status::running;
}

void free_cells(Configuration& config, std::size_t tape, std::int64_t count) {
  if (tape >= config.tapes.size()) throw Error(ErrorKind::invalid_argument, "tape index out of range");
  if (count < 0) throw Error(ErrorKind::invalid_argument, "free count must be non-negative");
  if (config.machine->tape_role(tape) != TapeRole::work)
    throw Error(ErrorKind::invalid_argument, "only work-tape cells can be freed");
  Tape& t = config.tapes[tape];
  for (std::int64_t i = 0; i < count; ++i) t.free(t.head + i);
}

}  // namespace workfn
