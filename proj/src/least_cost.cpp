#include "workfn/least_cost.h"

#include <cmath>
#include <limits>

#include "workfn/machine_io.h"
#include "workfn/run.h"

namespace workfn {

using nlohmann::json;

Task task_accept_all() {
  return Task{"accept_all", [](const Configuration&) { return true; }};
}

Task task_write_at_origin(Symbol symbol) {
  return Task{"write_at_origin", [symbol](const Configuration& c) { return c.tapes.at(0).read_at(0) == symbol; }};
}

Task task_output_string(std::vector<Symbol> symbols) {
  return Task{"output_string", [symbols](const Configuration& c) {
                for (std::size_t i = 0; i < symbols.size(); ++i)
                  if (c.tapes.at(0).read_at(static_cast<Position>(i)) != symbols[i]) return false;
                return true;
              }};
}

Task parse_task(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind")) throw Error(ErrorKind::schema, "task needs a \"kind\"");
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "accept_all") return task_accept_all();
  if (kind == "write_at_origin") return task_write_at_origin(doc.at("symbol").get<Symbol>());
  if (kind == "output_string") return task_output_string(doc.at("symbols").get<std::vector<Symbol>>());
  throw Error(ErrorKind::schema, "unknown task kind \"" + kind + "\"");
}

double program_bits(const MachineSpec& machine, std::size_t cells) {
  return static_cast<double>(cells) * ceil_log2(machine.tape_alphabet(0));
}

namespace {

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

// Number of programs of length <= L over an alphabet of size N, saturating.
std::uint64_t program_count(std::uint64_t N, std::size_t L, std::uint64_t cap) {
  std::uint64_t total = 0;
  for (std::size_t len = 0; len <= L; ++len) {
    total += checked_pow(N, len, cap);
    if (total > cap) return cap + 1;
  }
  return total;
}

// Calls f(program) for every program of length <= L in shortlex order.
template <typename F>
void for_each_program(std::size_t N, std::size_t L, F&& f) {
  std::vector<Symbol> p;
  for (std::size_t len = 0; len <= L; ++len) {
    p.assign(len, 0);
    for (;;) {
      f(p);
      std::size_t i = len;
      while (i > 0 && p[i - 1] + 1 == N) p[--i] = 0;
      if (i == 0) break;
      ++p[i - 1];
    }
  }
}

// Longest program the size bound admits: size < C, and at least one step
// (or zero steps if the machine starts halted) must fit the budget.
std::size_t size_bound_cells(const MachineSpec& m, const CostModel& model, double C, double extra_bits, std::size_t hard_cap) {
  const double n = ceil_log2(m.tape_alphabet(0));
  std::size_t L = 0;
  for (;;) {
    const std::size_t next = L + 1;
    if (next > hard_cap) return next;
    if (program_bits(m, next) + extra_bits >= C) return L;
    if (!m.is_halt(m.initial_state())) {
      std::vector<std::size_t> leased(m.tape_count(), 0);
      leased[0] = next;
      if (model.information_for(leased).total() > C) return L;
    }
    if (n == 0) return hard_cap + 1;  // unary alphabet: size never grows
    L = next;
  }
}

struct Outcome {
  bool terminated = true;
  bool accepted = false;
  double cost = 0;
  std::uint64_t steps = 0;
  Configuration final;
};

Outcome run_candidate(MachinePtr machine, const std::vector<Symbol>& program, const CostModel& model, double C,
                      const Task& task) {
  Outcome o;
  o.final = Configuration::initial(machine);
  o.final.load(0, program);
  CostLedger ledger;
  RunLimits limits;
  limits.budget_bits = C;
  const double fixed = model.fixed_bits();
  limits.max_steps = fixed > 0 ? static_cast<std::uint64_t>(C / fixed) + 1 : std::numeric_limits<std::uint64_t>::max();
  const StopReason why = run(o.final, model, ledger, limits);
  o.terminated = why == StopReason::halted || why == StopReason::budget_exceeded;
  o.cost = ledger.total_bits();
  o.steps = ledger.step_count();
  o.accepted = why == StopReason::halted && task.accept(o.final);
  return o;
}

}  // namespace

SearchResult least_cost_program(MachinePtr machine, const std::vector<Symbol>& reference, const Task& task,
                                const SearchLimits& limits) {
  if (machine->tape_count() < 1 || machine->tape_role(0) != TapeRole::work)
    throw Error(ErrorKind::invalid_argument, "programs live on a first work tape");
  const CostModel model(*machine, limits.cost);

  Configuration ref = Configuration::initial(machine);
  ref.load(0, reference);
  CostLedger ref_ledger;
  RunLimits ref_limits;
  ref_limits.max_steps = limits.reference_step_cap;
  if (run(ref, model, ref_ledger, ref_limits) != StopReason::halted)
    throw Error(ErrorKind::invalid_argument, "reference program does not halt within the step cap");
  if (!task.accept(ref)) throw Error(ErrorKind::invalid_argument, "reference program is rejected by the task");

  SearchResult r;
  r.budget = ref_ledger.total_bits();
  const std::size_t bound = size_bound_cells(*machine, model, r.budget, 0.0, limits.max_program_cells);
  r.length_bound_binding = bound > limits.max_program_cells;
  r.program_cells_bound = std::min(bound, limits.max_program_cells);
  const std::uint64_t N = machine->tape_alphabet(0);
  if (program_count(N, r.program_cells_bound, limits.candidate_cap) > limits.candidate_cap)
    throw Error(ErrorKind::capacity, "search space exceeds the candidate cap");

  r.machines_examined = 1;
  for_each_program(N, r.program_cells_bound, [&](const std::vector<Symbol>& p) {
    if (program_bits(*machine, p.size()) >= r.budget) return;
    ++r.candidates_examined;
    Outcome o = run_candidate(machine, p, model, r.budget, task);
    if (!o.terminated) r.all_terminated = false;
    if (!o.accepted) return;
    ++r.accepted;
    if (!r.found || o.cost < r.best.cost) {
      r.found = true;
      r.best = Candidate{machine, 0, p, o.cost, o.steps, 0};
    }
  });
  if (!r.found) {
    r.found = true;
    r.best_is_reference = true;
    r.best = Candidate{machine, 0, reference, ref_ledger.total_bits(), ref_ledger.step_count(), 0};
  }
  return r;
}

std::uint64_t family_size(std::size_t M, std::size_t N, Move max_skip) {
  const std::uint64_t D = 2 * static_cast<std::uint64_t>(max_skip) + 1;
  return checked_pow(N * D * M, (M - 1) * N, std::numeric_limits<std::uint64_t>::max() - 1);
}

MachinePtr family_machine(std::size_t M, std::size_t N, Move max_skip, std::uint64_t code) {
  if (M == 0 || N == 0) throw Error(ErrorKind::invalid_argument, "family machines need states and symbols");
  const std::uint64_t D = 2 * static_cast<std::uint64_t>(max_skip) + 1;
  const std::uint64_t radix = N * D * M;
  std::vector<std::string> states, symbols;
  for (std::size_t q = 0; q < M; ++q) states.push_back("q" + std::to_string(q));
  for (std::size_t s = 0; s < N; ++s) symbols.push_back(std::to_string(s));
  auto m = std::make_shared<MachineSpec>(states, symbols, std::vector<TapeRole>{TapeRole::work}, max_skip, 0,
                                         std::vector<StateId>{static_cast<StateId>(M - 1)});
  Symbol read[1], write[1];
  Move move[1];
  std::uint64_t rest = code;
  for (StateId q = 0; q + 1 < M; ++q) {
    for (Symbol s = 0; s < N; ++s) {
      const std::uint64_t digit = rest % radix;
      rest /= radix;
      read[0] = s;
      write[0] = static_cast<Symbol>(digit % N);
      move[0] = static_cast<Move>((digit / N) % D) - max_skip;
      m->set_action(q, read, write, move, static_cast<StateId>(digit / (N * D)));
    }
  }
  if (rest != 0) throw Error(ErrorKind::invalid_argument, "machine code out of range");
  m->finalize();
  return m;
}

SearchResult least_cost_pair(const MachineFamily& family, double C, const Task& task, const SearchLimits& limits) {
  if (family.max_states == 0 || family.symbols == 0) throw Error(ErrorKind::invalid_argument, "empty family limits");
  const std::uint64_t D = 2 * static_cast<std::uint64_t>(family.max_skip) + 1;

  // Size the space first so an oversized request fails before any work.
  std::vector<std::size_t> admitted_states;
  std::uint64_t total = 0;
  for (std::size_t M = 1; M <= family.max_states; ++M) {
    if (fsm_size(M, family.symbols, D, 1) > C) continue;
    admitted_states.push_back(M);
    const std::uint64_t machines = family_size(M, family.symbols, family.max_skip);
    const std::uint64_t programs = program_count(family.symbols, limits.max_program_cells, limits.candidate_cap);
    if (machines > limits.candidate_cap || programs > limits.candidate_cap || machines * programs > limits.candidate_cap ||
        total + machines * programs > limits.candidate_cap)
      throw Error(ErrorKind::capacity, "search space exceeds the candidate cap");
    total += machines * programs;
  }
  if (admitted_states.empty()) throw Error(ErrorKind::not_found, "empty family: no machine fits the size bound");

  const EmulatorCapacity cap{family.max_states, family.symbols, family.max_skip};
  const MachinePtr emulator = build_utm_machine(cap);

  SearchResult r;
  r.budget = C;
  for (std::size_t M : admitted_states) {
    const std::uint64_t count = family_size(M, family.symbols, family.max_skip);
    for (std::uint64_t code = 0; code < count; ++code) {
      const MachinePtr machine = family_machine(M, family.symbols, family.max_skip, code);
      const CostModel model(*machine, limits.cost);
      const double S = fsm_size(*machine);
      ++r.machines_examined;
      const std::size_t bound = size_bound_cells(*machine, model, C, S, limits.max_program_cells);
      if (bound > limits.max_program_cells) r.length_bound_binding = true;
      const std::size_t L = std::min(bound, limits.max_program_cells);
      r.program_cells_bound = std::max(r.program_cells_bound, L);
      std::optional<EmulatorBundle> bundle;
      for_each_program(family.symbols, L, [&](const std::vector<Symbol>& p) {
        if (program_bits(*machine, p.size()) + S >= C) return;
        ++r.candidates_examined;
        Outcome o = run_candidate(machine, p, model, C, task);
        if (!o.terminated) r.all_terminated = false;
        if (!o.accepted) return;
        if (!bundle) bundle = build_utm_emulator(machine, cap, emulator);
        RunLimits el;
        el.budget_bits = cost_bound(o.cost, static_cast<double>(o.steps), bundle->constants) * (1 + 1e-9) +
                         tape_information(p.size(), ceil_log2(family.symbols));
        EmulationResult e = emulate_run(*bundle, p, el, limits.cost);
        if (e.stop != StopReason::halted) {
          r.all_terminated = false;
          return;
        }
        ++r.accepted;
        const double ec = e.ledger.total_bits();
        if (!r.found || ec < r.best.emulated_cost) {
          r.found = true;
          r.best = Candidate{machine, code, p, o.cost, o.steps, ec};
        }
      });
    }
  }
  return r;
}

json search_result_to_json(const SearchResult& r) {
  json best = nullptr;
  if (r.found) {
    best = {{"machine", machine_to_json(*r.best.machine)},
            {"machine_code", r.best.machine_code},
            {"program", r.best.program},
            {"cost_bits", r.best.cost},
            {"steps", r.best.steps},
            {"emulated_cost_bits", r.best.emulated_cost},
            {"is_reference", r.best_is_reference}};
  }
  return json{{"format_version", kFormatVersion},
              {"budget_bits", r.budget},
              {"found", r.found},
              {"best", best},
              {"candidates_examined", r.candidates_examined},
              {"machines_examined", r.machines_examined},
              {"accepted", r.accepted},
              {"all_terminated", r.all_terminated},
              {"program_cells_bound", r.program_cells_bound},
              {"length_bound_binding", r.length_bound_binding}};
}

}  // namespace workfn
