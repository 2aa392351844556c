#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force.h"
#include "generators.h"
#include "oracles.h"
#include "workfn/capacity.h"
#include "workfn/cost.h"
#include "workfn/emulator_utm.h"
#include "workfn/ensemble.h"
#include "workfn/game.h"
#include "workfn/least_cost.h"
#include "workfn/machine_io.h"
#include "workfn/neural.h"
#include "workfn/run.h"
#include "workfn/skip_expansion.h"
#include "workfn/tradeoff.h"

using namespace workfn;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

using Check = std::function<void(Outcome&)>;

bool report(int id, double limit_s, const Check& check) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    check(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream limit;
  limit << "runtime " << s << " s exceeds " << limit_s << " s";
  o.require(s < limit_s, limit.str());
  std::printf("criterion %d: %s  %s (%.3f s)\n", id, o.pass ? "PASS" : "FAIL", o.detail.str().c_str(), s);
  for (const auto& f : o.failures) std::printf("    - %s\n", f.c_str());
  std::fflush(stdout);
  return o.pass;
}

std::string data(const std::string& rel) { return std::string(WORKFN_DATA_DIR) + "/" + rel; }

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// 1. Tit-for-Tat against a 10-turn script in packed table mode.
void tit_for_tat(Outcome& o) {
  const auto m = tit_for_tat_machine();
  const auto script = parse_script(*m, read_json_file(data("scripts/titfortat_10.json")));
  GameOptions opt;
  opt.cost.table_mode = TableSizeMode::packed;
  const auto t = play(m, script, opt);
  std::size_t move_turns = 0;
  for (std::size_t i = 0; i < t.turns.size(); ++i) {
    if (script.turns[i].halt) continue;
    ++move_turns;
    double bits = 0;
    for (double b : t.turns[i].step_bits) bits += b;
    o.require(bits == 76, "turn " + std::to_string(i) + " cost " + num(bits) + " bits");
  }
  o.require(move_turns == 10, "expected 10 move turns, played " + std::to_string(move_turns));
  o.require(t.verdict == Verdict::system_wins, std::string("verdict ") + to_string(t.verdict));
  o.require(!t.first_illegal, "illegal move recorded");
  o.detail << move_turns << " turns at 76 bits/turn, verdict " << to_string(t.verdict);
}

// 2. Head-operation cost.
void head_cost(Outcome& o) {
  const double r8 = head_cost_per_step(256, 256, 256) / fsm_size(256, 256, 256);
  const double r16 = head_cost_per_step(65536, 65536, 65536) / fsm_size(65536, 65536, 65536);
  o.require(r8 >= 0.055 && r8 <= 0.07, "8-bit ratio " + num(r8));
  o.require(r16 < 0.0003, "16-bit ratio " + num(r16));
  o.require(counter_cost(2) == 25, "counter_cost(2) = " + num(counter_cost(2)));
  o.detail << "8-bit ratio " << num(100 * r8) << "%, 16-bit ratio " << num(100 * r16) << "%, counter_cost(2) = "
           << counter_cost(2);
}

bool rel_eq(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)}); }

// 3. Cost-function properties over random machines.
void cost_properties(Outcome& o) {
  gen::Rng rng(2024);
  const int machines = 1200;
  int mono = 0, serial = 0, parallel = 0, sound = 0;
  for (int i = 0; i < machines; ++i) {
    const auto M = static_cast<std::size_t>(gen::uniform(rng, 2, 4));
    const auto N = static_cast<std::size_t>(gen::uniform(rng, 2, 3));
    const auto Dmax = static_cast<Move>(gen::uniform(rng, 1, 2));
    const auto t = static_cast<std::size_t>(gen::uniform(rng, 1, 2));
    const auto m = gen::multi_tape(rng, M, N, Dmax, t);
    const CostModel model(*m);
    const auto steps = static_cast<std::uint64_t>(gen::uniform(rng, 1, 120));

    // strict monotonicity
    Configuration c = Configuration::initial(m);
    CostLedger whole;
    double last = 0;
    bool increasing = true;
    run(c, model, whole, RunLimits{1e15, steps}, [&](const Configuration&, const StepEffect&) {
      increasing &= whole.total_bits() > last;
      last = whole.total_bits();
    });
    mono += increasing;

    // serial: a run split in two, and two runs on a re-initialized machine
    const auto cut = static_cast<std::uint64_t>(gen::uniform(rng, 0, static_cast<std::int64_t>(steps)));
    Configuration s = Configuration::initial(m);
    CostLedger first, second;
    run(s, model, first, RunLimits{1e15, cut});
    run(s, model, second, RunLimits{1e15, steps - cut});
    Configuration r1 = Configuration::initial(m), r2 = Configuration::initial(m);
    CostLedger a, b, both;
    run(r1, model, a, RunLimits{1e15, cut});
    run(r2, model, b, RunLimits{1e15, steps});
    Configuration q1 = Configuration::initial(m), q2 = Configuration::initial(m);
    run(q1, model, both, RunLimits{1e15, cut});
    run(q2, model, both, RunLimits{1e15, steps});
    serial += rel_eq(first.total_bits() + second.total_bits(), whole.total_bits(), 1e-9) &&
              rel_eq(both.total_bits(), a.total_bits() + b.total_bits(), 1e-9);

    // parallel: independent machines in one ensemble
    Ensemble e;
    double separate = 0;
    const auto k = gen::uniform(rng, 2, 4);
    std::vector<std::uint64_t> caps;
    for (std::int64_t j = 0; j < k; ++j) {
      const auto mj = gen::multi_tape(rng, M, N, Dmax, t);
      const auto cap = static_cast<std::uint64_t>(gen::uniform(rng, 1, 40));
      Configuration cj = Configuration::initial(mj);
      CostLedger lj;
      run(cj, CostModel(*mj), lj, RunLimits{1e15, cap});
      separate += lj.total_bits();
      caps.push_back(lj.step_count());
      e.add(Configuration::initial(mj));
    }
    for (std::uint64_t tick = 0; tick < *std::max_element(caps.begin(), caps.end()); ++tick) {
      e.tick();
      for (std::size_t j = 0; j < caps.size(); ++j)
        if (e.config(j).steps >= caps[j] && e.config(j).status == Status::running) e.config(j).status = Status::halted;
    }
    parallel += rel_eq(e.total_cost(), separate, 1e-9);

    // budget soundness: first step over budget means no step at all
    Configuration z = Configuration::initial(m);
    CostLedger zl;
    const double first_step = model.information_for(leased_after_step(z)).total();
    run(z, model, zl, RunLimits{first_step * 0.999, 100});
    sound += zl.step_count() == 0;
  }
  o.require(mono == machines, std::to_string(machines - mono) + " monotonicity violations");
  o.require(serial == machines, std::to_string(machines - serial) + " serial additivity violations");
  o.require(parallel == machines, std::to_string(machines - parallel) + " parallel additivity violations");
  o.require(sound == machines, std::to_string(machines - sound) + " budget soundness violations");
  o.detail << machines << " machines: monotone " << mono << ", serial " << serial << ", parallel " << parallel
           << ", budget-sound " << sound;
}

// 4. Dual-tape emulator on random single-tape machines.
void utm_emulator(Outcome& o) {
  gen::Rng rng(4242);
  int done = 0, tapes = 0, steps_ok = 0, bound_ok = 0;
  double worst = 0;
  while (done < 120) {
    const auto M = static_cast<std::size_t>(gen::uniform(rng, 2, 6));
    const auto N = static_cast<std::size_t>(gen::uniform(rng, 2, 4));
    const auto Dmax = static_cast<Move>(gen::uniform(rng, 1, 2));
    const auto m = gen::single_tape(rng, M, N, Dmax, 0.15);
    const auto in = gen::word(rng, 6, N);
    Configuration direct = Configuration::initial(m);
    direct.load(0, in);
    CostLedger dl;
    if (run(direct, CostModel(*m), dl, RunLimits{1e15, 400}) != StopReason::halted) continue;
    ++done;
    const auto b = build_utm_emulator(m);
    const auto e = emulate_run(b, in);
    const std::uint64_t L = dl.step_count(), E = e.ledger.step_count();
    tapes += e.stop == StopReason::halted && e.config.tapes[0].cells() == direct.tapes[0].cells();
    steps_ok += E >= 4 * L && E <= 4 * L + 1;
    const double bound = cost_bound(dl.total_bits(), static_cast<double>(L), e.constants);
    bound_ok += e.ledger.total_bits() <= bound * (1 + 1e-9);
    worst = std::max(worst, e.ledger.total_bits() / bound);
  }
  o.require(tapes == done, std::to_string(done - tapes) + " final-tape mismatches");
  o.require(steps_ok == done, std::to_string(done - steps_ok) + " step counts outside [4L, 4L+1]");
  o.require(bound_ok == done, std::to_string(done - bound_ok) + " cost-bound violations");
  o.detail << done << " machines: tapes equal " << tapes << ", steps in [4L, 4L+1] " << steps_ok << ", bound holds "
           << bound_ok << " (max C'/bound " << num(worst) << ")";
}

// 5. Neural nets on machine ensembles.
void neural(Outcome& o) {
  gen::Rng rng(555);
  const int nets = 60;
  int traj = 0, ticks = 0, bound = 0, runs = 0;
  for (int i = 0; i < nets; ++i) {
    const auto net = gen::net(rng, 6, 4, 6);
    const auto d = simulate_direct(net, 20);
    const std::size_t k = std::max<std::size_t>(1, net.max_in_degree());
    for (bool acc : {false, true}) {
      ++runs;
      const auto e = emulate_net(net, 20, net.nodes.size(), k, acc);
      traj += e.trajectory == d.trajectory;
      ticks += e.lockstep_ticks == 20 * (acc ? 6 : k + 5);
      bound += e.cost <= e.bound.full;
    }
  }
  const double acc32 = FastAccumulator::logic_bits(32);
  o.require(traj == runs, std::to_string(runs - traj) + " trajectory mismatches");
  o.require(ticks == runs, std::to_string(runs - ticks) + " wrong steps per tick");
  o.require(bound == runs, std::to_string(runs - bound) + " bound violations");
  o.require(acc32 == 591, "accumulator bits for A=32: " + num(acc32));
  o.detail << nets << " nets x 2 modes: trajectories equal " << traj << "/" << runs << ", steps per tick k+5 / 6 "
           << ticks << "/" << runs << ", bound holds " << bound << "/" << runs << ", A=32 accumulator " << acc32 << " bits";
}

// 6. Least-cost pair search against brute force.
void least_cost(Outcome& o) {
  const MachineFamily fam{2, 2, 1};
  SearchLimits lim;
  lim.max_program_cells = 4;
  std::uint64_t candidates = 0;
  for (std::size_t M = 1; M <= 2; ++M) candidates += family_size(M, 2, 1) * 31;
  o.require(candidates <= 10000, "family has " + std::to_string(candidates) + " candidates");
  auto accept = [](const brute::Tape& t) {
    auto it = t.find(0);
    return it != t.end() && it->second == 1;
  };
  double last = std::numeric_limits<double>::infinity();
  o.detail << candidates << " candidates;";
  for (double C : {7.0, 10.0, 120.0}) {
    const auto r = least_cost_pair(fam, C, task_write_at_origin(1), lim);
    const auto b = brute::pair_search(2, 2, 1, C, 4, accept);
    o.require(r.found == b.found, "found flags differ at C=" + num(C));
    if (!r.found || !b.found) {
      o.detail << " C=" << C << ": none";
      continue;
    }
    o.require(rel_eq(r.best.emulated_cost, b.emulated, 1e-12), "best cost differs at C=" + num(C));
    bool listed = false;
    for (auto [M, code] : b.machines) listed |= M == r.best.machine->state_count() && code == r.best.machine_code;
    o.require(listed, "best machine not among brute-force minimizers at C=" + num(C));
    o.require(r.best.emulated_cost <= last, "best cost increased at C=" + num(C));
    o.require(r.all_terminated, "a candidate did not terminate at C=" + num(C));
    last = r.best.emulated_cost;
    o.detail << " C=" << C << ": " << num(r.best.emulated_cost) << " bits";
  }
}

// 7. Complexity/time trade-off.
void tradeoff(Outcome& o) {
  const double mn[] = {4, 8, 16};
  int unity = 0, limits = 0, roots = 0, cross = 0, total = 0, cross_total = 0;
  double worst_root = 0, worst_cross = 0;
  for (double m : mn)
    for (double n : mn) {
      ++total;
      unity += cost_ratio(1.0, 1.0, 3.7, m, n) == 1.0 && cost_ratio(1.0, 5.0, 0.0, m, n) == 1.0;
      bool lim_ok = true;
      for (double d : {0.8, 0.95, 1.05}) {
        lim_ok &= rel_eq(cost_ratio(d, 1.0, 1e6, m, n), 1.0 / d, 0.01);
        lim_ok &= rel_eq(cost_ratio(d, 1.0, 1e-6, m, n), gamma_delta(d, m, n), 0.01);
      }
      limits += lim_ok;
      const double root = optimal_delta((m + n) / std::log(2.0), m, n);
      worst_root = std::max(worst_root, std::fabs(root - 1.0));
      roots += std::fabs(root - 1.0) <= 1e-6;
      for (double w : {(m + n) / std::log(2.0), 2.0, 50.0}) {
        ++cross_total;
        const double gap = std::fabs(argmin_delta(w, m, n) - optimal_delta(w, m, n));
        worst_cross = std::max(worst_cross, gap);
        cross += gap <= 1e-6;
      }
    }
  o.require(unity == total, "cost_ratio(1) differs from 1");
  o.require(limits == total, std::to_string(total - limits) + " limit checks outside 1%");
  o.require(roots == total, "optimal_delta((m+n)/ln 2) off by " + num(worst_root));
  o.require(cross == cross_total, "argmin of cost_ratio and root of the stationarity condition differ by up to " +
                                      num(worst_cross) + " (" + std::to_string(cross_total - cross) + "/" +
                                      std::to_string(cross_total) + " cases)");
  o.detail << "ratio(1)=1 " << unity << "/" << total << ", limits " << limits << "/" << total << ", delta*=1 " << roots
           << "/" << total << ", argmin cross-check " << cross << "/" << cross_total;
}

// 8. Capacity case studies.
void capacity(Outcome& o) {
  struct Expect {
    const char* fixture;
    const char* key;
  };
  const Expect expects[] = {
      {"amd64_x2", "cpu_cores"},           {"amd64_x2", "ram"},
      {"amd64_x2", "total_bytes_per_second"}, {"geforce_8800gt", "gpu"},
      {"ibm_pc", "total_bytes_per_second"}, {"amd64_x2", "db"},
      {"pentium_ii_1998", "processor"},    {"pentium_ii_1998", "main_memory"},
      {"pentium_ii_1998", "fleet_total_bytes"}, {"pentium_ii_1998", "per_key_bytes"},
      {"pentium_ii_1998", "keys_per_second"}, {"eff_des_cracker", "chips"},
      {"eff_des_cracker", "workload_total_bytes"}, {"human_brain_static", "state_bytes"},
      {"human_brain_static", "bytes_per_second"}, {"human_brain_dynamic", "bytes_per_second"},
      {"c_elegans", "bytes_per_second"},   {"human_neuron", "bytes_per_second"},
  };
  int ok = 0;
  for (const auto& e : expects) {
    const auto r = evaluate_fixture(read_json_file(data(std::string("capacity/") + e.fixture + ".json")), true);
    const bool agrees = r.agrees(e.key);
    ok += agrees;
    o.require(agrees, std::string(e.fixture) + "." + e.key + " = " + num(r.values.at(e.key)) + ", published " +
                          num(r.published.at(e.key).value));
  }
  const auto neuron = evaluate_fixture(read_json_file(data("capacity/human_neuron.json")), true);
  const auto worm = evaluate_fixture(read_json_file(data("capacity/c_elegans.json")), true);
  const double ratio = neuron.values.at("bytes_per_second") / worm.values.at("bytes_per_second");
  o.require(std::fabs(ratio - 6.0) <= 0.2 * 6.0, "neuron/worm ratio " + num(ratio));
  o.detail << ok << "/" << std::size(expects) << " published figures within tolerance, neuron/worm " << num(ratio);
}

// 9. Skip elimination.
void skip_elimination(Outcome& o) {
  gen::Rng rng(909);
  int machines = 0, equal = 0, bounded = 0;
  std::vector<double> mean_ratio;
  for (Move Dmax : {2, 3, 4}) {
    double sum = 0;
    int count = 0;
    while (count < 25) {
      const auto m = gen::single_tape(rng, 3, 2, Dmax, 0.15);
      const auto in = gen::word(rng, 4, 2);
      Configuration a = Configuration::initial(m);
      a.load(0, in);
      CostLedger la;
      if (run(a, CostModel(*m), la, RunLimits{1e15, 300}) != StopReason::halted || la.step_count() == 0) continue;
      const auto x = expand_skips(*m);
      Configuration b = Configuration::initial(x);
      b.load(0, in);
      CostLedger lb;
      const bool halted = run(b, CostModel(*x), lb, RunLimits{1e15, 300 * static_cast<std::uint64_t>(Dmax)}) == StopReason::halted;
      ++machines;
      ++count;
      equal += halted && a.tapes[0].cells() == b.tapes[0].cells();
      const double table_ratio = fsm_size(*x) / fsm_size(*m);
      const double D = 2.0 * Dmax + 1;
      bounded += table_ratio <= m->symbol_count() * D * D;
      sum += lb.total_bits() / la.total_bits();
    }
    mean_ratio.push_back(sum / count);
  }
  o.require(equal == machines, std::to_string(machines - equal) + " final-tape mismatches");
  o.require(bounded == machines, std::to_string(machines - bounded) + " table growth above N D^2");
  for (std::size_t i = 1; i < mean_ratio.size(); ++i)
    o.require(mean_ratio[i] > mean_ratio[i - 1], "mean cost ratio not increasing from Dmax=" + std::to_string(i + 1));
  o.detail << machines << " machines, tapes equal " << equal << ", mean cost ratio expanded/skip for Dmax=2,3,4: "
           << num(mean_ratio[0]) << ", " << num(mean_ratio[1]) << ", " << num(mean_ratio[2]);
}

}  // namespace

int main() {
  bool all = true;
  all &= report(1, 1, tit_for_tat);
  all &= report(2, 1, head_cost);
  all &= report(3, 60, cost_properties);
  all &= report(4, 120, utm_emulator);
  all &= report(5, 120, neural);
  all &= report(6, 120, least_cost);
  all &= report(7, 10, tradeoff);
  all &= report(8, 1, capacity);
  all &= report(9, 120, skip_elimination);
  std::printf("%s\n", all ? "all criteria passed" : "some criteria failed");
  return all ? 0 : 1;
}
