#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "json.hpp"
#include "workfn/cost.h"
#include "workfn/machine.h"
#include "workfn/run.h"

namespace workfn {

// Largest single-tape machine an emulator can host.
struct EmulatorCapacity {
  std::size_t states = 0;
  std::size_t symbols = 0;
  Move max_skip = 1;
};

// Emulation cost constants for C' <= gamma * (C + Lambda * (alpha + epsilon)) + beta.
struct UtmConstants {
  double alpha = 0;    // emulator action table and state register, per step
  double epsilon = 0;  // T_b table storage minus the target's own table size, per step
  double beta = 0;     // one extra step: alpha + T_b + initial T_a information
  double gamma = 4;
};

// Target action table stored on T_b. Row (q, s) starts at 3*N_a*q + 3*s and
// holds {new symbol, T_a move, T_b offset to the next state's block}; moves
// and offsets are zigzag coded (0, -1, 1, -2, ... -> 0, 1, 2, 3, ...). Halt
// states send T_b to a single halt-mark cell after the last block.
struct UtmLayout {
  std::size_t block_width = 0;  // 3 * N_a
  Position halt_block = 0;
  Position initial_head = 0;
  Symbol halt_mark = 0;
  std::vector<Symbol> program;  // T_b contents from cell 0
};

struct EmulatorBundle {
  MachinePtr emulator;  // tape 0 = T_a, tape 1 = T_b
  MachinePtr emulated;
  EmulatorCapacity capacity;
  UtmLayout layout;
  UtmConstants constants;  // beta excludes the input; see emulate_run
};

// Emulator states.
enum UtmState : StateId { kFetch = 0, kWrite = 1, kMoveA = 2, kJump = 3, kUtmHalt = 4 };

Symbol zigzag_encode(std::int64_t v);
std::int64_t zigzag_decode(Symbol s);

// Emulator machine that can host any target within `capacity`. Its cycle per
// emulated step is fetch (T_b to row), write (T_a symbol), move_a (T_a
// head), jump (T_b to the next block); a final fetch reads the halt mark.
MachinePtr build_utm_machine(const EmulatorCapacity& capacity);

EmulatorBundle build_utm_emulator(MachinePtr target);
// Hosts `target` on the shared emulator for `capacity`.
EmulatorBundle build_utm_emulator(MachinePtr target, const EmulatorCapacity& capacity, MachinePtr emulator = nullptr);

struct EmulationResult {
  Configuration config;
  CostLedger ledger;
  StopReason stop;
  UtmConstants constants;  // beta includes the information of the initial T_a
};

EmulationResult emulate_run(const EmulatorBundle& bundle, const std::vector<Symbol>& input,
                            const RunLimits& limits = {}, CostOptions options = {});

// gamma * (C + Lambda * (alpha + epsilon)) + beta.
double cost_bound(double C, double Lambda, const UtmConstants& k);

// Information of a single work tape holding `cells` leased cells.
double tape_information(std::size_t cells, double bits_per_cell);

// Emulator spec document plus the layout sidecar.
nlohmann::json bundle_to_json(const EmulatorBundle& b);
nlohmann::json layout_to_json(const EmulatorBundle& b);
nlohmann::json constants_to_json(const UtmConstants& k);

}  // namespace workfn
