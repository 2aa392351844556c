#include "workfn/skip_expansion.h"

#include <map>
#include <tuple>

namespace workfn {

MachinePtr expand_skips(const MachineSpec& spec) {
  if (spec.tape_count() != 1) throw Error(ErrorKind::invalid_argument, "skip expansion needs a single-tape machine");
  const std::size_t M = spec.state_count();
  const std::size_t N = spec.symbol_count();

  // (destination, remaining, direction) -> travel state id.
  std::map<std::tuple<StateId, Move, int>, StateId> travel;
  std::vector<std::string> names = spec.state_names();
  auto travel_state = [&](StateId dest, Move remaining, int dir) {
    auto key = std::make_tuple(dest, remaining, dir);
    auto it = travel.find(key);
    if (it != travel.end()) return it->second;
    const auto id = static_cast<StateId>(names.size());
    names.push_back(spec.state_name(dest) + "~" + (dir > 0 ? "+" : "-") + std::to_string(remaining));
    travel.emplace(key, id);
    return id;
  };

  // First pass allocates every travel chain that is needed.
  std::vector<Symbol> read(1);
  for (StateId q = 0; q < M; ++q) {
    if (spec.is_halt(q)) continue;
    for (Symbol s = 0; s < N; ++s) {
      read[0] = s;
      const auto act = spec.action(q, read);
      const Move mv = act.move[0];
      const int dir = mv > 0 ? 1 : -1;
      for (Move r = (mv > 0 ? mv : -mv) - 1; r >= 1; --r) travel_state(act.next, r, dir);
    }
  }

  auto out = std::make_shared<MachineSpec>(names, spec.symbol_names(), spec.tape_roles(), std::min<Move>(spec.max_skip(), 1),
                                           spec.initial_state(), spec.halt_states());
  out->set_tape_alphabet(0, spec.tape_alphabet(0));
  std::vector<Symbol> write(1);
  std::vector<Move> move(1);
  for (StateId q = 0; q < M; ++q) {
    if (spec.is_halt(q)) continue;
    for (Symbol s = 0; s < N; ++s) {
      read[0] = s;
      const auto act = spec.action(q, read);
      const Move mv = act.move[0];
      write[0] = act.write[0];
      if (mv >= -1 && mv <= 1) {
        move[0] = mv;
        out->set_action(q, read, write, move, act.next);
      } else {
        const int dir = mv > 0 ? 1 : -1;
        move[0] = dir;
        out->set_action(q, read, write, move, travel.at({act.next, (mv > 0 ? mv : -mv) - 1, dir}));
      }
    }
  }
  for (const auto& [key, id] : travel) {
    const auto [dest, remaining, dir] = key;
    const StateId next = remaining > 1 ? travel.at({dest, remaining - 1, dir}) : dest;
    for (Symbol s = 0; s < N; ++s) {
      read[0] = s;
      write[0] = s;
      move[0] = dir;
      out->set_action(id, read, write, move, next);
    }
  }
  out->finalize();
  return out;
}

}  // namespace workfn
