#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "workfn/cost.h"
#include "workfn/machine.h"

namespace workfn {

enum class Player { system, environment };
enum class Verdict { system_wins, environment_wins, unfinished };

const char* to_string(Player p);
const char* to_string(Verdict v);

// Turn protocol on a single run tape: turn i occupies cells 2i and 2i+1. The
// Environment fills cell 2i with a random symbol (the cell the System will
// overwrite with its move) and cell 2i+1 with its own move, then wakes the
// System. A halting turn writes the halt symbol "H" into cell 2i only.
struct ScriptTurn {
  std::optional<Symbol> random;  // drawn from the seeded generator if absent
  std::optional<Symbol> move;
  bool halt = false;
};

struct EnvironmentScript {
  std::vector<ScriptTurn> turns;
  std::optional<std::uint64_t> seed;
};

// Accepts either a bare array of turns or {"seed": s, "turns": [...]}.
// Turn objects: {"random": "C", "move": "D"} or {"halt": true}.
EnvironmentScript parse_script(const MachineSpec& system, const nlohmann::json& doc);

struct IllegalMove {
  Player player;
  std::size_t turn;
  std::string reason;
};

struct TurnRecord {
  std::vector<CellWrite> environment_writes;
  std::vector<CellWrite> system_writes;
  std::vector<double> step_bits;
};

struct GameTranscript {
  std::vector<TurnRecord> turns;
  Verdict verdict = Verdict::unfinished;
  std::optional<IllegalMove> first_illegal;
  bool environment_halted = false;  // the Environment played its H
  bool system_halted = false;
  bool budget_exhausted = false;
  double total_bits = 0;
  std::uint64_t steps = 0;
};

struct GameOptions {
  std::size_t max_turns = 1000;
  double budget_bits = std::numeric_limits<double>::infinity();
  CostOptions cost;
};

// States {c, d, r, h}, symbols {C, D, H}, one run tape and nine entries.
MachinePtr tit_for_tat_machine();

// Plays the script against the System. Environment writes happen only while
// the System sleeps; cost accrues only on awake steps.
GameTranscript play(MachinePtr system, const EnvironmentScript& script, const GameOptions& options);

// The first illegal move loses; otherwise a game the Environment ended with
// H and the System halted on is won by the System; anything else is
// unfinished.
Verdict judge(const GameTranscript& transcript);

nlohmann::json transcript_to_json(const GameTranscript& t, const MachineSpec& system);

}  // namespace workfn
