#include "workfn/emulator_utm.h"

#include <algorithm>
#include <cmath>

#include "workfn/machine_io.h"

namespace workfn {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxEmulatorSymbols = 4096;

// Largest |move| stored anywhere on T_b for a capacity.
std::int64_t stored_range(const EmulatorCapacity& c) {
  const auto w = static_cast<std::int64_t>(3 * c.symbols);
  const auto M = static_cast<std::int64_t>(c.states);
  return std::max<std::int64_t>(c.max_skip, w * M - 1);
}

void check_capacity(const EmulatorCapacity& c) {
  if (c.states == 0 || c.symbols == 0) throw Error(ErrorKind::invalid_argument, "empty emulator capacity");
  if (c.max_skip < 0) throw Error(ErrorKind::invalid_argument, "negative skip");
  if (2 * static_cast<std::size_t>(stored_range(c)) + 2 > kMaxEmulatorSymbols)
    throw Error(ErrorKind::capacity, "target too large for the emulator alphabet");
}

}  // namespace

Symbol zigzag_encode(std::int64_t v) {
  return static_cast<Symbol>(v >= 0 ? 2 * v : -2 * v - 1);
}

std::int64_t zigzag_decode(Symbol s) {
  return s % 2 == 0 ? static_cast<std::int64_t>(s / 2) : -static_cast<std::int64_t>((s + 1) / 2);
}

MachinePtr build_utm_machine(const EmulatorCapacity& cap) {
  check_capacity(cap);
  const std::int64_t V = stored_range(cap);
  const auto Na = static_cast<Symbol>(cap.symbols);
  const auto Nb = static_cast<Symbol>(std::max<std::int64_t>(2 * V + 1, Na) + 1);
  const Symbol halt_mark = Nb - 1;
  const auto Dmax = static_cast<Move>(std::max<std::int64_t>(V, 3 * (static_cast<std::int64_t>(Na) - 1)));

  std::vector<std::string> symbols;
  for (Symbol s = 0; s < Nb; ++s) symbols.push_back(std::to_string(s));
  auto m = std::make_shared<MachineSpec>(std::vector<std::string>{"fetch", "write", "move_a", "jump", "halt"}, symbols,
                                         std::vector<TapeRole>{TapeRole::work, TapeRole::work}, Dmax, kFetch,
                                         std::vector<StateId>{kUtmHalt});
  m->set_tape_alphabet(0, Na);

  auto decoded = [&](Symbol sb) -> Move { return sb <= 2 * V ? static_cast<Move>(zigzag_decode(sb)) : 0; };
  Symbol read[2], write[2];
  Move move[2];
  for (Symbol sa = 0; sa < Nb; ++sa) {
    for (Symbol sb = 0; sb < Nb; ++sb) {
      read[0] = sa;
      read[1] = sb;
      write[0] = sa;
      write[1] = sb;
      const bool live = sa < Na;

      move[0] = 0;
      move[1] = live && sb != halt_mark ? static_cast<Move>(3 * sa) : 0;
      m->set_action(kFetch, read, write, move, sb == halt_mark ? kUtmHalt : kWrite);

      write[0] = live && sb < Na ? sb : sa;
      move[1] = 1;
      m->set_action(kWrite, read, write, move, kMoveA);

      write[0] = sa;
      move[0] = live ? std::clamp<Move>(decoded(sb), -Dmax, Dmax) : 0;
      m->set_action(kMoveA, read, write, move, kJump);

      move[0] = 0;
      move[1] = decoded(sb);
      m->set_action(kJump, read, write, move, kFetch);
    }
  }
  m->finalize();
  return m;
}

EmulatorBundle build_utm_emulator(MachinePtr target) {
  return build_utm_emulator(target, EmulatorCapacity{target->state_count(), target->symbol_count(), target->max_skip()});
}

EmulatorBundle build_utm_emulator(MachinePtr target, const EmulatorCapacity& cap, MachinePtr emulator) {
  if (target->tape_count() != 1 || target->tape_role(0) != TapeRole::work)
    throw Error(ErrorKind::invalid_argument, "the emulator hosts single work-tape machines only");
  if (target->accumulator()) throw Error(ErrorKind::invalid_argument, "the emulator cannot host attached devices");
  if (target->symbol_count() != cap.symbols)
    throw Error(ErrorKind::invalid_argument, "target alphabet must match the emulator's T_a alphabet");
  if (target->state_count() > cap.states || target->max_skip() > cap.max_skip)
    throw Error(ErrorKind::capacity, "target too large for the emulator");
  if (!emulator) emulator = build_utm_machine(cap);

  EmulatorBundle b;
  b.emulator = emulator;
  b.emulated = target;
  b.capacity = cap;
  const std::size_t Na = cap.symbols;
  const std::size_t w = 3 * Na;
  b.layout.block_width = w;
  b.layout.halt_block = static_cast<Position>(w * target->state_count());
  b.layout.halt_mark = static_cast<Symbol>(emulator->symbol_count() - 1);
  auto block = [&](StateId q) { return target->is_halt(q) ? b.layout.halt_block : static_cast<Position>(w * q); };
  b.layout.initial_head = block(target->initial_state());

  auto& prog = b.layout.program;
  prog.assign(w * target->state_count() + 1, kBlank);
  prog.back() = b.layout.halt_mark;
  Symbol read[1];
  for (StateId q = 0; q < target->state_count(); ++q) {
    if (target->is_halt(q)) continue;
    for (Symbol s = 0; s < Na; ++s) {
      read[0] = s;
      const auto act = target->action(q, read);
      const Position row = static_cast<Position>(w * q + 3 * s);
      prog[row] = act.write[0];
      prog[row + 1] = zigzag_encode(act.move[0]);
      prog[row + 2] = zigzag_encode(block(act.next) - (row + 2));
    }
  }

  const CostModel em(*emulator), tm(*target);
  b.constants.alpha = em.fixed_bits();
  const double tb = tape_information(prog.size(), em.cell_bits(1));
  b.constants.epsilon = tb - tm.fixed_bits();
  b.constants.beta = b.constants.alpha + tb;
  return b;
}

double tape_information(std::size_t cells, double bits_per_cell) {
  return ceil_log2(cells + 1) + static_cast<double>(cells) * bits_per_cell;
}

EmulationResult emulate_run(const EmulatorBundle& b, const std::vector<Symbol>& input, const RunLimits& limits,
                            CostOptions options) {
  for (Symbol s : input)
    if (s >= b.emulated->symbol_count()) throw Error(ErrorKind::invalid_argument, "input symbol outside the target alphabet");
  EmulationResult r{Configuration::initial(b.emulator), CostLedger{}, StopReason::halted, {}};
  r.config.load(0, input);
  r.config.load(1, b.layout.program);
  r.config.tapes[1].head = b.layout.initial_head;

  const CostModel em(*b.emulator, options), tm(*b.emulated, options);
  const double tb = tape_information(b.layout.program.size(), em.cell_bits(1));
  std::size_t leased_input = r.config.tapes[0].leased_count();
  r.constants.alpha = em.fixed_bits();
  r.constants.epsilon = tb - tm.fixed_bits();
  r.constants.beta = r.constants.alpha + tb + (leased_input ? tape_information(leased_input, em.cell_bits(0)) : 0.0);
  r.stop = run(r.config, em, r.ledger, limits);
  return r;
}

double cost_bound(double C, double Lambda, const UtmConstants& k) {
  if (C < 0 || Lambda < 0) throw Error(ErrorKind::invalid_argument, "cost and step count must be non-negative");
  return k.gamma * (C + Lambda * (k.alpha + k.epsilon)) + k.beta;
}

json constants_to_json(const UtmConstants& k) {
  return json{{"alpha", k.alpha}, {"beta", k.beta}, {"gamma", k.gamma}, {"epsilon", k.epsilon}};
}

json layout_to_json(const EmulatorBundle& b) {
  json rows = json::array();
  for (StateId q = 0; q < b.emulated->state_count(); ++q) {
    if (b.emulated->is_halt(q)) continue;
    for (Symbol s = 0; s < b.emulated->symbol_count(); ++s)
      rows.push_back({{"state", b.emulated->state_name(q)},
                      {"symbol", b.emulated->symbol_name(s)},
                      {"position", b.layout.block_width * q + 3 * s}});
  }
  return json{{"format_version", kFormatVersion},
              {"rows", rows},
              {"fields", {"new_symbol", "move_a", "offset_b"}},
              {"halt_block", b.layout.halt_block},
              {"halt_mark", b.layout.halt_mark},
              {"initial_head", b.layout.initial_head},
              {"program", b.layout.program},
              {"constants", constants_to_json(b.constants)}};
}

json bundle_to_json(const EmulatorBundle& b) {
  return json{{"format_version", kFormatVersion},
              {"emulator", machine_to_json(*b.emulator)},
              {"emulated", machine_to_json(*b.emulated)},
              {"layout", layout_to_json(b)}};
}

}  // namespace workfn
