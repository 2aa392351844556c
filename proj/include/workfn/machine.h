#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "workfn/bits.h"

namespace workfn {

using Symbol = std::uint32_t;
using StateId = std::uint32_t;
using Move = std::int32_t;
using Position = std::int64_t;

constexpr Symbol kBlank = 0;

// Run and valuation tapes belong to the Environment and are never charged.
// The System may not move backwards on a run tape and may not change a
// valuation tape.
enum class TapeRole { work, run, valuation };

const char* to_string(TapeRole role);

// Parallel adder attached to a machine. While the machine is in
// `trigger_state` a step reads `inputs` consecutive cells of `source_tape`
// starting under the head, sums them as `value_bits`-wide two's complement
// numbers, moves the head of `target_tape` by `stride * sum` and the source
// head past the inputs, then enters `next_state`. Nothing is written.
struct FastAccumulator {
  StateId trigger_state = 0;
  std::size_t source_tape = 0;
  std::size_t inputs = 0;
  std::size_t target_tape = 1;
  std::int64_t stride = 1;
  unsigned value_bits = 8;
  StateId next_state = 0;

  // Logic content of one accumulator of width A: 19A - 17 bits.
  static double logic_bits(unsigned value_bits);
};

// Finite-state control of a multi-tape machine with relative skip moves.
//
// The action table is dense over (state, read-vector). Rows of halt states
// are filled with "write back, stay" entries when the caller leaves them
// undefined; they are never executed.
class MachineSpec {
 public:
  struct Action {
    std::span<const Symbol> write;
    std::span<const Move> move;
    StateId next;
  };

  MachineSpec(std::vector<std::string> state_names,
              std::vector<std::string> symbol_names,
              std::vector<TapeRole> tape_roles, Move max_skip,
              StateId initial_state, std::vector<StateId> halt_states);

  void set_action(StateId state, std::span<const Symbol> read,
                  std::span<const Symbol> write, std::span<const Move> move,
                  StateId next);

  // Narrows the alphabet a tape may hold; cells of that tape are charged
  // ceil_log2(limit) bits instead of ceil_log2(N).
  void set_tape_alphabet(std::size_t tape, Symbol limit);

  void attach_accumulator(const FastAccumulator& acc);

  // Checks totality, ranges, tape-role rules and alphabet closure. Fills
  // undefined halt-state rows. Throws Error(schema) naming the first defect.
  void finalize();

  std::size_t state_count() const { return state_names_.size(); }
  std::size_t symbol_count() const { return symbol_names_.size(); }
  std::size_t tape_count() const { return roles_.size(); }
  Move max_skip() const { return max_skip_; }
  std::uint64_t move_count() const { return 2 * static_cast<std::uint64_t>(max_skip_) + 1; }

  unsigned state_bits() const { return ceil_log2(state_count()); }
  unsigned symbol_bits() const { return ceil_log2(symbol_count()); }
  unsigned move_bits() const { return ceil_log2(move_count()); }

  StateId initial_state() const { return initial_; }
  bool is_halt(StateId s) const { return halt_[s]; }
  const std::vector<StateId>& halt_states() const { return halt_list_; }

  TapeRole tape_role(std::size_t tape) const { return roles_[tape]; }
  const std::vector<TapeRole>& tape_roles() const { return roles_; }
  std::optional<std::size_t> run_tape() const;
  std::optional<std::size_t> valuation_tape() const;
  std::size_t work_tape_count() const;
  Symbol tape_alphabet(std::size_t tape) const { return tape_alphabet_[tape]; }

  const std::optional<FastAccumulator>& accumulator() const { return accumulator_; }

  const std::string& state_name(StateId s) const { return state_names_[s]; }
  const std::string& symbol_name(Symbol s) const { return symbol_names_[s]; }
  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::vector<std::string>& symbol_names() const { return symbol_names_; }
  std::optional<StateId> find_state(const std::string& name) const;
  std::optional<Symbol> find_symbol(const std::string& name) const;

  std::uint64_t entry_count() const { return next_.size(); }
  std::uint64_t entries_per_state() const { return per_state_; }
  Action action(StateId state, std::span<const Symbol> read) const;
  Action entry(std::uint64_t index) const;
  bool defined(std::uint64_t index) const { return defined_[index]; }
  // Decodes an entry index back into its (state, read-vector).
  void decode_entry(std::uint64_t index, StateId& state, std::vector<Symbol>& read) const;

 private:
  std::uint64_t index_of(StateId state, std::span<const Symbol> read) const;

  std::vector<std::string> state_names_;
  std::vector<std::string> symbol_names_;
  std::vector<TapeRole> roles_;
  std::vector<Symbol> tape_alphabet_;
  Move max_skip_;
  StateId initial_;
  std::vector<bool> halt_;
  std::vector<StateId> halt_list_;
  std::uint64_t per_state_ = 1;

  std::vector<Symbol> writes_;
  std::vector<Move> moves_;
  std::vector<StateId> next_;
  std::vector<bool> defined_;
  std::optional<FastAccumulator> accumulator_;
};

using MachinePtr = std::shared_ptr<const MachineSpec>;

// Sparse tape. A cell is leased once written with a non-blank symbol (or
// loaded at initialization) and stays leased until freed. Unleased cells read
// blank. On a run tape "leased" doubles as "written by someone".
class Tape {
 public:
  Symbol read() const { return read_at(head); }
  Symbol read_at(Position pos) const;
  bool is_leased(Position pos) const { return cells_.count(pos) != 0; }

  // Returns true if the cell changed (symbol or lease state).
  bool write(Position pos, Symbol symbol);
  // Unconditionally leases the cell with `symbol`; used for initial loads
  // and aliased-cell propagation.
  bool load(Position pos, Symbol symbol);
  void free(Position pos);

  std::size_t leased_count() const { return cells_.size(); }
  const std::map<Position, Symbol>& cells() const { return cells_; }

  Position head = 0;

  bool operator==(const Tape&) const = default;

 private:
  std::map<Position, Symbol> cells_;
};

enum class Status { running, sleeping, halted, budget_exceeded };

const char* to_string(Status status);

struct Configuration {
  MachinePtr machine;
  StateId state = 0;
  std::vector<Tape> tapes;
  std::uint64_t steps = 0;
  Status status = Status::running;

  // Fresh configuration in the initial state with empty tapes; sleeping if
  // the machine has a run tape whose first cell is still unwritten.
  static Configuration initial(MachinePtr machine);

  // Leases `cells` on `tape` starting at `origin`.
  void load(std::size_t tape, std::span<const Symbol> cells, Position origin = 0);
};

struct CellWrite {
  std::size_t tape;
  Position position;
  Symbol symbol;
};

// Cells whose symbol or lease state changed in one step.
struct StepEffect {
  std::vector<CellWrite> writes;
};

// One read-write-move cycle. Throws Error(invalid_argument) unless the
// configuration is running; the configuration is left untouched then.
StepEffect step(Configuration& config);

// Leased cell counts per tape as they would be after the next step, without
// executing it.
std::vector<std::size_t> leased_after_step(const Configuration& config);

// Puts a sleeping configuration back to running once its run-tape cell has
// been written. Returns true if it is awake afterwards.
bool wake(Configuration& config);

// Ends the lease on `count` cells starting at the head of `tape`.
void free_cells(Configuration& config, std::size_t tape, std::int64_t count);

}  // namespace workfn
