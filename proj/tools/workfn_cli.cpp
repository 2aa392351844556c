#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "workfn/capacity.h"
#include "workfn/cost.h"
#include "workfn/emulator_utm.h"
#include "workfn/game.h"
#include "workfn/least_cost.h"
#include "workfn/machine_io.h"
#include "workfn/neural.h"
#include "workfn/run.h"
#include "workfn/tradeoff.h"

using nlohmann::json;
using namespace workfn;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 2,
  kSchema = 3,
  kNotFound = 4,
  kBudget = 5,
  kFailure = 6,
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::schema: return kSchema;
    case ErrorKind::not_found: return kNotFound;
    case ErrorKind::budget_exceeded: return kBudget;
    default: return kFailure;
  }
}

void error_record(const std::string& kind, const std::string& message) {
  json e{{"format_version", kFormatVersion}, {"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << e.dump() << '\n';
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") std::cout << content;
  else write_file_atomically(path, content);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

CostOptions cost_options(const std::string& table_mode, bool head_cost) {
  CostOptions o;
  if (table_mode == "packed") o.table_mode = TableSizeMode::packed;
  else if (table_mode == "formula") o.table_mode = TableSizeMode::formula;
  else throw Error(ErrorKind::invalid_argument, "table-size mode must be formula or packed");
  o.include_head_cost = head_cost;
  return o;
}

MachinePtr machine_arg(const std::string& s) {
  if (s == "titfortat") return tit_for_tat_machine();
  return load_machine_file(s);
}

// Comma-separated symbol names, or @file holding a JSON array of names.
std::vector<Symbol> input_arg(const MachineSpec& m, const std::string& s) {
  if (s.empty()) return {};
  if (s[0] == '@') return parse_symbols(m, read_json_file(s.substr(1)));
  json names = json::array();
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) names.push_back(item);
  return parse_symbols(m, names);
}

json tape_json(const MachineSpec& m, const Tape& t) {
  json cells = json::array();
  for (const auto& [pos, sym] : t.cells()) cells.push_back({pos, m.symbol_name(sym)});
  return json{{"head", t.head}, {"cells", cells}};
}

std::string data_path(const std::string& name, const char* sub) {
  namespace fs = std::filesystem;
  if (fs::exists(name)) return name;
  std::vector<std::string> roots;
  if (const char* env = std::getenv("WORKFN_DATA_DIR")) roots.push_back(env);
#ifdef WORKFN_DATA_DIR
  roots.push_back(WORKFN_DATA_DIR);
#endif
  for (const auto& r : roots) {
    for (const std::string& candidate : {name, name + ".json"}) {
      fs::path p = fs::path(r) / sub / candidate;
      if (fs::exists(p)) return p.string();
    }
  }
  throw Error(ErrorKind::not_found, "cannot find " + name);
}

std::string trace_text(const CostLedger& ledger, const std::string& path) {
  const bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  return csv ? ledger_to_csv(ledger, 0) : ledger_to_jsonl(ledger, 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workfn: cost-metered Turing machines, games, emulators and capacity estimates"};
  app.require_subcommand(1);

  std::string output, table_mode = "formula", trace, format = "json";
  bool head_cost = false;

  // run
  auto* run_cmd = app.add_subcommand("run", "run a machine and meter its cost");
  std::string machine_path, input;
  double budget = std::numeric_limits<double>::infinity();
  std::uint64_t max_steps = 1'000'000;
  run_cmd->add_option("--machine", machine_path, "machine spec JSON")->required();
  run_cmd->add_option("--input", input, "first work tape: comma-separated symbols or @file");
  run_cmd->add_option("--budget", budget, "budget in bits");
  run_cmd->add_option("--max-steps", max_steps, "step cap");
  run_cmd->add_option("--table-size", table_mode, "formula | packed");
  run_cmd->add_flag("--head-cost", head_cost, "charge the head-operation cost");
  run_cmd->add_option("--trace", trace, "per-step ledger (.jsonl or .csv)");
  run_cmd->add_option("--output,-o", output, "report path (default stdout)");

  // game
  auto* game_cmd = app.add_subcommand("game", "play a System against a scripted Environment");
  std::string system = "titfortat", script_path;
  std::optional<std::uint64_t> seed;
  std::size_t max_turns = 1000;
  std::string game_table = "packed";
  game_cmd->add_option("--system", system, "titfortat or a machine spec JSON");
  game_cmd->add_option("--script", script_path, "Environment script JSON")->required();
  game_cmd->add_option("--seed", seed, "seed for turns without a scripted random symbol");
  game_cmd->add_option("--max-turns", max_turns);
  game_cmd->add_option("--budget", budget, "budget in bits");
  game_cmd->add_option("--table-size", game_table, "formula | packed (default packed)");
  game_cmd->add_flag("--head-cost", head_cost);
  game_cmd->add_option("--trace", trace, "per-step ledger (.jsonl or .csv)");
  game_cmd->add_option("--output,-o", output);

  // emulate
  auto* emu_cmd = app.add_subcommand("emulate", "run a single-tape machine directly and on the dual-tape emulator");
  std::string bundle_out, layout_out;
  emu_cmd->add_option("--machine", machine_path)->required();
  emu_cmd->add_option("--input", input);
  emu_cmd->add_option("--max-steps", max_steps, "step cap for the direct run");
  emu_cmd->add_option("--budget", budget, "budget in bits for the emulated run");
  emu_cmd->add_option("--bundle", bundle_out, "write emulator spec plus layout");
  emu_cmd->add_option("--layout", layout_out, "write the layout sidecar");
  emu_cmd->add_option("--output,-o", output);

  // nnsim
  auto* nn_cmd = app.add_subcommand("nnsim", "simulate a neural net directly and on the machine ensemble");
  std::string net_path;
  std::size_t ticks = 20, n_max = 0, k_max = 0;
  bool accumulator = false, emulate = false;
  nn_cmd->add_option("--net", net_path)->required();
  nn_cmd->add_option("--ticks", ticks);
  nn_cmd->add_flag("--accumulator", accumulator, "use the fast accumulator");
  nn_cmd->add_flag("--emulate", emulate, "also run the ensemble emulator");
  nn_cmd->add_option("--nmax", n_max, "node slots (default: node count)");
  nn_cmd->add_option("--kmax", k_max, "synapse slots per node (default: max in-degree)");
  nn_cmd->add_option("--output,-o", output);

  // search
  auto* search_cmd = app.add_subcommand("search", "least-cost program or machine/program pair");
  std::string mode = "program", task_path, reference;
  std::size_t max_states = 2, symbols = 2, max_cells = 4;
  Move max_skip = 1;
  std::uint64_t candidate_cap = 1'000'000;
  double bound_c = 0;
  search_cmd->add_option("--mode", mode, "program | pair");
  search_cmd->add_option("--machine", machine_path, "program mode: machine spec JSON");
  search_cmd->add_option("--reference", reference, "program mode: reference program");
  search_cmd->add_option("--task", task_path, "task JSON")->required();
  search_cmd->add_option("--max-states", max_states);
  search_cmd->add_option("--symbols", symbols);
  search_cmd->add_option("--max-skip", max_skip);
  search_cmd->add_option("--bound", bound_c, "pair mode: size/cost bound C in bits");
  search_cmd->add_option("--max-cells", max_cells, "declared program length bound");
  search_cmd->add_option("--candidate-cap", candidate_cap);
  search_cmd->add_option("--output,-o", output);

  // tradeoff
  auto* trade_cmd = app.add_subcommand("tradeoff", "complexity versus time trade-off");
  double m = 8, n = 8, omega = 0, lo = 0.25, hi = 2.0;
  std::size_t points = 50;
  std::string csv_out;
  trade_cmd->add_option("--m", m)->required();
  trade_cmd->add_option("--n", n)->required();
  trade_cmd->add_option("--omega", omega, "I_eff / S")->required();
  trade_cmd->add_option("--csv", csv_out, "write (delta, ratio) curve");
  trade_cmd->add_option("--from", lo);
  trade_cmd->add_option("--to", hi);
  trade_cmd->add_option("--points", points);
  trade_cmd->add_option("--output,-o", output);

  // capacity
  auto* cap_cmd = app.add_subcommand("capacity", "capacity report for a case-study fixture");
  std::string fixture;
  bool byte_rounding = false;
  cap_cmd->add_option("--fixture", fixture, "fixture path or name")->required();
  cap_cmd->add_flag("--byte-rounding", byte_rounding, "use the byte-rounded descriptor sizes");
  cap_cmd->add_option("--format", format, "json | csv | text");
  cap_cmd->add_option("--output,-o", output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    error_record("usage", e.what());
    return kUsage;
  }

  try {
    if (*run_cmd) {
      const MachinePtr mach = load_machine_file(machine_path);
      const CostModel model(*mach, cost_options(table_mode, head_cost));
      Configuration c = Configuration::initial(mach);
      c.load(0, input_arg(*mach, input));
      CostLedger ledger;
      const StopReason why = run(c, model, ledger, RunLimits{budget, max_steps});
      if (!trace.empty()) write_file_atomically(trace, trace_text(ledger, trace));
      json tapes = json::array();
      for (const auto& t : c.tapes) tapes.push_back(tape_json(*mach, t));
      emit(output, dump({{"format_version", kFormatVersion},
                         {"stop", to_string(why)},
                         {"state", mach->state_name(c.state)},
                         {"steps", ledger.step_count()},
                         {"cost_bits", ledger.total_bits()},
                         {"tapes", tapes}}));
      return why == StopReason::budget_exceeded ? kBudget : kOk;
    }
    if (*game_cmd) {
      const MachinePtr mach = machine_arg(system);
      EnvironmentScript script = parse_script(*mach, read_json_file(script_path));
      if (seed) script.seed = seed;
      GameOptions opts;
      opts.max_turns = max_turns;
      opts.budget_bits = budget;
      opts.cost = cost_options(game_table, head_cost);
      const GameTranscript t = play(mach, script, opts);
      if (!trace.empty()) {
        std::ostringstream os;
        std::uint64_t lambda = 0;
        for (std::size_t i = 0; i < t.turns.size(); ++i)
          for (double b : t.turns[i].step_bits)
            os << json{{"turn", i}, {"lambda", ++lambda}, {"bits", b}}.dump() << '\n';
        write_file_atomically(trace, os.str());
      }
      emit(output, dump(transcript_to_json(t, *mach)));
      return t.budget_exhausted ? kBudget : kOk;
    }
    if (*emu_cmd) {
      const MachinePtr target = load_machine_file(machine_path);
      const auto in = input_arg(*target, input);
      const CostModel model(*target);
      Configuration direct = Configuration::initial(target);
      direct.load(0, in);
      CostLedger dl;
      const StopReason dwhy = run(direct, model, dl, RunLimits{std::numeric_limits<double>::infinity(), max_steps});
      if (dwhy != StopReason::halted) throw Error(ErrorKind::invalid_argument, "direct run did not halt within the step cap");
      const EmulatorBundle b = build_utm_emulator(target);
      if (!bundle_out.empty()) write_file_atomically(bundle_out, dump(bundle_to_json(b)));
      if (!layout_out.empty()) write_file_atomically(layout_out, dump(layout_to_json(b)));
      RunLimits el;
      el.budget_bits = budget;
      const EmulationResult e = emulate_run(b, in, el);
      const double bound = cost_bound(dl.total_bits(), static_cast<double>(dl.step_count()), e.constants);
      emit(output, dump({{"format_version", kFormatVersion},
                         {"direct", {{"steps", dl.step_count()}, {"cost_bits", dl.total_bits()}}},
                         {"emulated", {{"stop", to_string(e.stop)}, {"steps", e.ledger.step_count()}, {"cost_bits", e.ledger.total_bits()}}},
                         {"constants", constants_to_json(e.constants)},
                         {"bound_bits", bound},
                         {"bound_holds", e.ledger.total_bits() <= bound * (1 + 1e-9)},
                         {"tapes_equal", e.config.tapes[0].cells() == direct.tapes[0].cells()}}));
      return e.stop == StopReason::budget_exceeded ? kBudget : kOk;
    }
    if (*nn_cmd) {
      const NeuralNetSpec net = load_net(read_json_file(net_path));
      const DirectRun d = simulate_direct(net, ticks, accumulator);
      json traj = json::array();
      for (const auto& s : d.trajectory) traj.push_back(s.eta);
      json report{{"format_version", kFormatVersion},
                  {"ticks", ticks},
                  {"eta", traj},
                  {"direct_cost_bits", d.cost},
                  {"direct_model", cost_model_to_json(d.model)}};
      if (emulate) {
        const std::size_t N = n_max ? n_max : net.nodes.size();
        const std::size_t K = k_max ? k_max : net.max_in_degree();
        const EmulatedRun e = emulate_net(net, ticks, N, K, accumulator);
        report["emulated"] = {{"cost_bits", e.cost},
                              {"lockstep_ticks", e.lockstep_ticks},
                              {"steps_per_tick", e.model.gamma},
                              {"trajectory_equal", e.trajectory == d.trajectory},
                              {"bound_bits", e.bound.full},
                              {"bound_holds", e.cost <= e.bound.full},
                              {"model", cost_model_to_json(e.model)}};
      }
      emit(output, dump(report));
      return kOk;
    }
    if (*search_cmd) {
      const Task task = parse_task(read_json_file(task_path));
      SearchLimits lim;
      lim.max_program_cells = max_cells;
      lim.candidate_cap = candidate_cap;
      SearchResult r;
      if (mode == "program") {
        if (machine_path.empty()) throw Error(ErrorKind::invalid_argument, "program mode needs --machine");
        const MachinePtr mach = load_machine_file(machine_path);
        r = least_cost_program(mach, input_arg(*mach, reference), task, lim);
      } else if (mode == "pair") {
        r = least_cost_pair(MachineFamily{max_states, symbols, max_skip}, bound_c, task, lim);
      } else {
        throw Error(ErrorKind::invalid_argument, "mode must be program or pair");
      }
      emit(output, dump(search_result_to_json(r)));
      return kOk;
    }
    if (*trade_cmd) {
      const double d_star = optimal_delta(omega, m, n);
      const double d_min = argmin_delta(omega, m, n);
      std::ostringstream fmt;
      fmt << std::fixed << std::setprecision(6) << d_star;
      if (!csv_out.empty()) {
        std::ostringstream os;
        os << std::setprecision(17) << "delta,cost_ratio\n";
        for (const auto& p : ratio_curve(omega, m, n, lo, hi, points)) os << p.delta << ',' << p.ratio << '\n';
        write_file_atomically(csv_out, os.str());
      }
      emit(output, dump({{"format_version", kFormatVersion},
                         {"m", m},
                         {"n", n},
                         {"omega", omega},
                         {"delta_star", d_star},
                         {"delta_star_text", fmt.str()},
                         {"argmin_delta", d_min},
                         {"stationarity_omega_at_1", stationarity_omega(1.0, m, n)},
                         {"cost_ratio_at_delta_star", cost_ratio(d_star, 1.0, omega, m, n)},
                         {"cost_ratio_at_argmin", cost_ratio(d_min, 1.0, omega, m, n)}}));
      return kOk;
    }
    if (*cap_cmd) {
      const CapacityReport r = evaluate_fixture(read_json_file(data_path(fixture, "capacity")), byte_rounding);
      if (format == "json") emit(output, dump(report_to_json(r)));
      else if (format == "csv") emit(output, report_to_csv(r));
      else if (format == "text") emit(output, report_to_text(r));
      else throw Error(ErrorKind::invalid_argument, "format must be json, csv or text");
      return kOk;
    }
  } catch (const Error& e) {
    error_record(to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    error_record("internal", e.what());
    return kFailure;
  }
  return kOk;
}
