#include "workfn/game.h"

#include <random>

#include "workfn/machine_io.h"
#include "workfn/run.h"

namespace workfn {

using nlohmann::json;

const char* to_string(Player p) { return p == Player::system ? "system" : "environment"; }

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::system_wins: return "system_wins";
    case Verdict::environment_wins: return "environment_wins";
    case Verdict::unfinished: return "unfinished";
  }
  return "?";
}

namespace {

Symbol halt_symbol(const MachineSpec& spec) {
  auto h = spec.find_symbol("H");
  if (!h) throw Error(ErrorKind::schema, "game machines need a halt symbol \"H\"");
  return *h;
}

Symbol symbol_of(const MachineSpec& spec, const json& j) {
  if (!j.is_string()) throw Error(ErrorKind::schema, "script symbols must be names");
  auto s = spec.find_symbol(j.get<std::string>());
  if (!s) throw Error(ErrorKind::schema, "unknown script symbol \"" + j.get<std::string>() + "\"");
  return *s;
}

}  // namespace

EnvironmentScript parse_script(const MachineSpec& system, const json& doc) {
  EnvironmentScript script;
  const json* turns = &doc;
  if (doc.is_object()) {
    if (doc.contains("seed")) script.seed = doc.at("seed").get<std::uint64_t>();
    if (!doc.contains("turns")) throw Error(ErrorKind::schema, "script object needs \"turns\"");
    turns = &doc.at("turns");
  }
  if (!turns->is_array()) throw Error(ErrorKind::schema, "script turns must be an array");
  for (const auto& t : *turns) {
    if (!t.is_object()) throw Error(ErrorKind::schema, "script turn must be an object");
    ScriptTurn turn;
    turn.halt = t.value("halt", false);
    if (t.contains("random")) turn.random = symbol_of(system, t.at("random"));
    if (t.contains("move")) turn.move = symbol_of(system, t.at("move"));
    if (!turn.halt && !turn.move) throw Error(ErrorKind::schema, "script turn needs \"move\" or \"halt\"");
    script.turns.push_back(turn);
  }
  return script;
}

MachinePtr tit_for_tat_machine() {
  auto m = std::make_shared<MachineSpec>(std::vector<std::string>{"c", "d", "r", "h"},
                                         std::vector<std::string>{"C", "D", "H"},
                                         std::vector<TapeRole>{TapeRole::run}, 1, 0, std::vector<StateId>{3});
  const Symbol C = 0, D = 1, H = 2;
  const StateId c = 0, d = 1, r = 2, h = 3;
  auto row = [&](StateId q, Symbol read, Symbol write, Move mv, StateId next) {
    const Symbol rd[1] = {read};
    const Symbol wr[1] = {write};
    const Move mo[1] = {mv};
    m->set_action(q, rd, wr, mo, next);
  };
  row(c, C, C, 1, r);
  row(c, D, C, 1, r);
  row(c, H, C, 0, h);
  row(d, C, D, 1, r);
  row(d, D, D, 1, r);
  row(d, H, D, 0, h);
  row(r, C, C, 1, c);
  row(r, D, D, 1, d);
  row(r, H, C, 0, h);
  m->finalize();
  return m;
}

GameTranscript play(MachinePtr system, const EnvironmentScript& script, const GameOptions& options) {
  const auto rt = system->run_tape();
  if (!rt) throw Error(ErrorKind::invalid_argument, "the System needs a run tape");
  const Symbol H = halt_symbol(*system);
  std::vector<Symbol> move_symbols;
  for (Symbol s = 0; s < system->symbol_count(); ++s)
    if (s != H) move_symbols.push_back(s);

  std::optional<std::mt19937_64> rng;
  if (script.seed) rng.emplace(*script.seed);

  GameTranscript tr;
  auto illegal = [&](Player p, std::size_t turn, std::string reason) {
    if (!tr.first_illegal) tr.first_illegal = IllegalMove{p, turn, std::move(reason)};
  };

  Configuration config = Configuration::initial(system);
  const CostModel model(*system, options.cost);
  CostLedger ledger;
  Tape& board = config.tapes[*rt];

  for (std::size_t i = 0; i < script.turns.size(); ++i) {
    if (i >= options.max_turns) break;
    const ScriptTurn& st = script.turns[i];
    TurnRecord rec;
    const Position first = static_cast<Position>(2 * i);
    auto env_write = [&](Position pos, Symbol sym) {
      if (board.is_leased(pos)) illegal(Player::environment, i, "overwrote cell " + std::to_string(pos));
      board.load(pos, sym);
      rec.environment_writes.push_back(CellWrite{*rt, pos, sym});
    };
    if (st.halt) {
      env_write(first, H);
    } else {
      Symbol random;
      if (st.random) {
        random = *st.random;
      } else {
        if (!rng) throw Error(ErrorKind::invalid_argument, "script turn without \"random\" needs a seed");
        random = move_symbols[std::uniform_int_distribution<std::size_t>(0, move_symbols.size() - 1)(*rng)];
      }
      env_write(first, random);
      env_write(first + 1, *st.move);
      if (*st.move == H) illegal(Player::environment, i, "halt symbol in the move cell");
    }

    const std::size_t before = ledger.records().size();
    RunLimits limits;
    limits.budget_bits = options.budget_bits - ledger.total_bits();
    auto observer = [&](const Configuration&, const StepEffect& effect) {
      for (const auto& w : effect.writes) {
        if (w.tape != *rt) continue;
        rec.system_writes.push_back(w);
        if (w.symbol == H) illegal(Player::system, i, "wrote the halt symbol");
        else if (w.position % 2 == 1) illegal(Player::system, i, "changed the Environment's move in cell " + std::to_string(w.position));
        else if (w.position != first) illegal(Player::system, i, "wrote outside its move cell");
      }
    };
    const StopReason why = run(config, model, ledger, limits, observer);
    for (std::size_t k = before; k < ledger.records().size(); ++k) rec.step_bits.push_back(ledger.records()[k].bits);
    tr.turns.push_back(std::move(rec));

    if (st.halt) tr.environment_halted = true;
    if (why == StopReason::budget_exceeded) {
      tr.budget_exhausted = true;
      break;
    }
    if (why == StopReason::halted) {
      tr.system_halted = true;
      if (!st.halt && !tr.first_illegal) illegal(Player::system, i, "halted before the Environment ended the game");
      break;
    }
    if (st.halt) break;  // System did not halt on H; leave unfinished
  }

  tr.total_bits = ledger.total_bits();
  tr.steps = ledger.step_count();
  tr.verdict = judge(tr);
  return tr;
}

Verdict judge(const GameTranscript& t) {
  if (t.first_illegal)
    return t.first_illegal->player == Player::system ? Verdict::environment_wins : Verdict::system_wins;
  if (t.environment_halted && t.system_halted) return Verdict::system_wins;
  return Verdict::unfinished;
}

json transcript_to_json(const GameTranscript& t, const MachineSpec& system) {
  auto cells = [&](const std::vector<CellWrite>& ws) {
    json a = json::array();
    for (const auto& w : ws) a.push_back({{"cell", w.position}, {"symbol", system.symbol_name(w.symbol)}});
    return a;
  };
  json turns = json::array();
  for (const auto& r : t.turns)
    turns.push_back({{"environment", cells(r.environment_writes)}, {"system", cells(r.system_writes)}, {"step_bits", r.step_bits}});
  json illegal = nullptr;
  if (t.first_illegal)
    illegal = {{"player", to_string(t.first_illegal->player)}, {"turn", t.first_illegal->turn}, {"reason", t.first_illegal->reason}};
  return json{{"format_version", kFormatVersion},
              {"turns", turns},
              {"verdict", to_string(t.verdict)},
              {"first_illegal", illegal},
              {"environment_halted", t.environment_halted},
              {"system_halted", t.system_halted},
              {"budget_exhausted", t.budget_exhausted},
              {"total_bits", t.total_bits},
              {"steps", t.steps}};
}

}  // namespace workfn
