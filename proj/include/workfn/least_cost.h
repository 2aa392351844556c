#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "workfn/cost.h"
#include "workfn/emulator_utm.h"
#include "workfn/machine.h"

namespace workfn {

// Decides from a halted configuration whether the task was completed.
using TaskOracle = std::function<bool(const Configuration&)>;

struct Task {
  std::string name;
  TaskOracle accept;
};

Task task_accept_all();
// Cell 0 of tape 0 holds `symbol`.
Task task_write_at_origin(Symbol symbol);
// Cells 0.. of tape 0 hold `symbols`.
Task task_output_string(std::vector<Symbol> symbols);
// {"kind": "accept_all" | "write_at_origin" | "output_string", "symbol": s, "symbols": [...]}
// with symbols given as indices.
Task parse_task(const nlohmann::json& doc);

// A program is the initial content of the first work tape, leased from cell
// 0; its size is cells * ceil_log2(alphabet of that tape) bits.
struct SearchLimits {
  // Declared bound of the search space; candidates longer than this are not
  // part of the space even when the size bound would admit them.
  std::size_t max_program_cells = 6;
  std::uint64_t candidate_cap = 1'000'000;  // Error(capacity) if the space is larger
  std::uint64_t reference_step_cap = 1'000'000;
  CostOptions cost;
};

struct Candidate {
  MachinePtr machine;
  std::uint64_t machine_code = 0;
  std::vector<Symbol> program;
  double cost = 0;             // direct-run cost
  std::uint64_t steps = 0;
  double emulated_cost = 0;    // pair mode: cost on the common emulator
};

struct SearchResult {
  bool found = false;
  bool best_is_reference = false;
  Candidate best;
  double budget = 0;
  std::uint64_t candidates_examined = 0;
  std::uint64_t machines_examined = 0;
  std::uint64_t accepted = 0;
  bool all_terminated = true;
  std::size_t program_cells_bound = 0;
  bool length_bound_binding = false;  // the size bound alone would admit longer programs
};

double program_bits(const MachineSpec& machine, std::size_t cells);

// Runs the reference program to fix the budget C, then every program on the
// same machine whose size is below C, each with budget C. The cheapest
// accepted one wins; ties go to the earlier one in shortlex order, and the
// reference stands if nothing in the space beats it.
SearchResult least_cost_program(MachinePtr machine, const std::vector<Symbol>& reference, const Task& task,
                                const SearchLimits& limits = {});

// Single-tape machines with M <= max_states states (state 0 initial, state
// M-1 halting), N symbols and skips up to max_skip.
struct MachineFamily {
  std::size_t max_states = 2;
  std::size_t symbols = 2;
  Move max_skip = 1;
};

std::uint64_t family_size(std::size_t M, std::size_t N, Move max_skip);
// Machine number `code` among the M-state members: mixed radix over the
// (M-1)*N executable entries, first entry least significant; each digit
// packs (write, move, next) as write + N*(move + Dmax) + N*D*next.
MachinePtr family_machine(std::size_t M, std::size_t N, Move max_skip, std::uint64_t code);

// All family members with fsm_size <= C and programs with size + S < C. A
// candidate is run directly with budget C; accepted ones are then run on the
// family's common emulator with the emulation bound as budget and ranked by
// that emulated cost, ties by (machine, program) enumeration order.
SearchResult least_cost_pair(const MachineFamily& family, double C, const Task& task, const SearchLimits& limits = {});

nlohmann::json search_result_to_json(const SearchResult& r);

}  // namespace workfn
