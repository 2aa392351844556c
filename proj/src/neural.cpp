#include "workfn/neural.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "workfn/cost.h"
#include "workfn/emulator_utm.h"
#include "workfn/machine_io.h"

namespace workfn {

using nlohmann::json;

namespace {

[[noreturn]] void net_error(const std::string& msg) { throw Error(ErrorKind::schema, msg); }

constexpr unsigned kMaxEmulatedBits = 10;

}  // namespace

void NeuralNetSpec::validate() const {
  if (accumulator_bits < 1 || accumulator_bits > 32) net_error("accumulator_bits must be in [1, 32]");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    const std::string who = "node " + std::to_string(i);
    if (n.table.empty()) net_error(who + " has an empty table");
    const auto hi = n.potential_min + static_cast<std::int64_t>(n.table.size());
    for (const auto& r : n.table) {
      if (r.fire != 0 && r.fire != 1) net_error(who + ": fire must be 0 or 1");
      if (r.next_potential < n.potential_min || r.next_potential >= hi) net_error(who + ": next potential leaves the table");
    }
    if (n.initial_potential < n.potential_min || n.initial_potential >= hi) net_error(who + ": initial potential leaves the table");
    if (n.initial_state != 0 && n.initial_state != 1) net_error(who + ": initial state must be 0 or 1");
  }
  for (std::size_t i = 0; i < synapses.size(); ++i) {
    const auto& s = synapses[i];
    const std::string who = "synapse " + std::to_string(i);
    if (s.origin >= nodes.size()) net_error(who + ": origin references a nonexistent node");
    if (s.target >= nodes.size()) net_error(who + ": target references a nonexistent node");
    if (s.table.empty()) net_error(who + " has an empty table");
    if (s.initial >= s.table.size()) net_error(who + ": initial state out of range");
    for (const auto& r : s.table) {
      if (r.next[0] >= s.table.size() || r.next[1] >= s.table.size()) net_error(who + ": transition to a missing row");
      if (!fits_twos_complement(r.activation, accumulator_bits)) net_error(who + ": activation does not fit A bits");
    }
  }
}

std::vector<std::size_t> NeuralNetSpec::incoming(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < synapses.size(); ++i)
    if (synapses[i].target == node) out.push_back(i);
  return out;
}

std::size_t NeuralNetSpec::max_in_degree() const {
  std::size_t k = 0;
  for (std::size_t n = 0; n < nodes.size(); ++n) k = std::max(k, incoming(n).size());
  return k;
}

NeuralNetSpec load_net(const json& doc) {
  if (!doc.is_object() || !doc.contains("nodes")) net_error("net document needs \"nodes\"");
  NeuralNetSpec net;
  net.accumulator_bits = doc.value("accumulator_bits", 8u);
  try {
    for (const auto& jn : doc.at("nodes")) {
      NeuralNode n;
      for (const auto& row : jn.at("table")) n.table.push_back({row.at(0).get<int>(), row.at(1).get<std::int64_t>()});
      n.potential_min = jn.value("potential_min", std::int64_t{0});
      n.initial_potential = jn.value("initial_potential", n.potential_min);
      n.initial_state = jn.value("initial_state", 0);
      net.nodes.push_back(std::move(n));
    }
    if (doc.contains("synapses")) {
      for (const auto& js : doc.at("synapses")) {
        NeuralSynapse s;
        s.origin = js.at("origin").get<std::size_t>();
        s.target = js.at("target").get<std::size_t>();
        for (const auto& row : js.at("table")) {
          NeuralSynapse::Row r;
          r.activation = row.at(0).get<std::int64_t>();
          r.next[0] = row.at(1).get<std::size_t>();
          r.next[1] = row.at(2).get<std::size_t>();
          s.table.push_back(r);
        }
        s.initial = js.value("initial", std::size_t{0});
        net.synapses.push_back(std::move(s));
      }
    }
  } catch (const json::exception& e) {
    net_error(std::string("malformed net document: ") + e.what());
  }
  net.validate();
  return net;
}

json net_to_json(const NeuralNetSpec& net) {
  json nodes = json::array(), syns = json::array();
  for (const auto& n : net.nodes) {
    json t = json::array();
    for (const auto& r : n.table) t.push_back({r.fire, r.next_potential});
    nodes.push_back({{"table", t},
                     {"potential_min", n.potential_min},
                     {"initial_potential", n.initial_potential},
                     {"initial_state", n.initial_state}});
  }
  for (const auto& s : net.synapses) {
    json t = json::array();
    for (const auto& r : s.table) t.push_back({r.activation, r.next[0], r.next[1]});
    syns.push_back({{"origin", s.origin}, {"target", s.target}, {"table", t}, {"initial", s.initial}});
  }
  return json{{"format_version", kFormatVersion}, {"nodes", nodes}, {"synapses", syns}, {"accumulator_bits", net.accumulator_bits}};
}

NeuralState initial_state(const NeuralNetSpec& net) {
  NeuralState s;
  for (const auto& n : net.nodes) {
    s.eta.push_back(n.initial_state);
    s.potential.push_back(n.initial_potential);
  }
  for (const auto& syn : net.synapses) s.synapse_state.push_back(syn.initial);
  return s;
}

NeuralState advance(const NeuralNetSpec& net, const NeuralState& s) {
  NeuralState out = s;
  std::vector<std::int64_t> input(net.nodes.size(), 0);
  for (std::size_t i = 0; i < net.synapses.size(); ++i) {
    const auto& syn = net.synapses[i];
    const std::size_t next = syn.table[s.synapse_state[i]].next[s.eta[syn.origin]];
    out.synapse_state[i] = next;
    input[syn.target] += syn.table[next].activation;
  }
  for (std::size_t n = 0; n < net.nodes.size(); ++n) {
    const auto& node = net.nodes[n];
    const std::int64_t v = s.potential[n] + input[n];
    const std::int64_t row = v - node.potential_min;
    if (row < 0 || row >= static_cast<std::int64_t>(node.table.size()))
      throw Error(ErrorKind::invalid_argument, "potential of node " + std::to_string(n) + " left its table");
    out.eta[n] = node.table[row].fire;
    out.potential[n] = node.table[row].next_potential;
  }
  return out;
}

double neural_direct_cost(const NeuralCostModel& m) {
  return m.Lambda * m.N * (m.I_node() + m.k * (m.I_syn + std::log2(m.origin_population)));
}

NeuralBound neural_cost_bound(const NeuralCostModel& m) {
  for (double v : {m.alpha_B, m.alpha_A, m.alpha_syn, m.epsilon_B, m.epsilon_A, m.epsilon_syn, m.beta})
    if (v < 0) throw Error(ErrorKind::invalid_argument, "emulator constants must be non-negative");
  const double g = m.gamma;
  const double unused = g * m.Lambda * m.N_max * (m.alpha_B + m.k_max * (m.alpha_A + m.alpha_syn));
  NeuralBound b;
  b.full = g * m.Lambda * m.N *
               (m.I_B + m.epsilon_B + m.k * (m.I_syn + std::log2(m.origin_population) + m.I_A + m.epsilon_syn + m.epsilon_A)) +
           m.beta + unused;
  b.simplified = g * neural_direct_cost(m) + g * m.Lambda * m.N * (m.epsilon_B + m.k * (m.epsilon_A + m.epsilon_syn)) +
                 unused + m.beta;
  return b;
}

double node_table_bits(const NeuralNode& node) {
  const double R = static_cast<double>(node.table.size());
  const double r = ceil_log2(node.table.size());
  return R * (1 + r) + r;
}

double synapse_table_bits(const NeuralSynapse& syn, unsigned A) {
  const double S = static_cast<double>(syn.table.size());
  const double s = ceil_log2(syn.table.size());
  return S * 2 * (s + A) + s;
}

NeuralCostModel direct_cost_model(const NeuralNetSpec& net, double ticks, bool accumulator) {
  NeuralCostModel m;
  m.Lambda = ticks;
  m.N = static_cast<double>(net.nodes.size());
  m.k = static_cast<double>(net.max_in_degree());
  m.N_max = m.N;
  m.k_max = m.k;
  m.origin_population = std::max(1.0, m.N);
  for (const auto& n : net.nodes) m.I_B = std::max(m.I_B, node_table_bits(n));
  for (const auto& s : net.synapses) m.I_syn = std::max(m.I_syn, synapse_table_bits(s, net.accumulator_bits));
  m.I_A = accumulator ? FastAccumulator::logic_bits(net.accumulator_bits) : 0.0;
  m.gamma = accumulator ? 6.0 : m.k_max + 5.0;
  return m;
}

DirectRun simulate_direct(const NeuralNetSpec& net, std::size_t ticks, bool accumulator) {
  net.validate();
  DirectRun r;
  r.trajectory.push_back(initial_state(net));
  for (std::size_t t = 0; t < ticks; ++t) r.trajectory.push_back(advance(net, r.trajectory.back()));
  r.model = direct_cost_model(net, static_cast<double>(ticks), accumulator);
  r.cost = neural_direct_cost(r.model);
  return r;
}

namespace {

using MachineKey = std::tuple<std::size_t, unsigned, bool, bool>;

MachinePtr cached(const MachineKey& key, MachinePtr (*build)(std::size_t, unsigned, bool)) {
  static std::mutex mu;
  static std::map<MachineKey, MachinePtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto m = build(std::get<0>(key), std::get<1>(key), std::get<2>(key));
  cache.emplace(key, m);
  return m;
}

void check_width(unsigned A) {
  if (A < 2 || A > kMaxEmulatedBits)
    throw Error(ErrorKind::capacity, "emulated activation width must be in [2, " + std::to_string(kMaxEmulatedBits) + "]");
}

std::vector<std::string> numbered_symbols(unsigned A) {
  std::vector<std::string> out;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << A); ++s) out.push_back(std::to_string(s));
  return out;
}

MachinePtr build_node_machine(std::size_t k, unsigned A, bool acc) {
  check_width(A);
  // W1 W2 W3, then A_1..A_k (or one accumulator step), F, U.
  std::vector<std::string> names{"W1", "W2", "W3"};
  const std::size_t sum_steps = acc ? 1 : k;
  for (std::size_t j = 0; j < sum_steps; ++j) names.push_back(acc ? "ACC" : "A" + std::to_string(j + 1));
  const auto F = static_cast<StateId>(names.size());
  names.push_back("F");
  const auto U = static_cast<StateId>(names.size());
  names.push_back("U");
  const Symbol N = Symbol{1} << A;
  const Move Dmax = static_cast<Move>(N);
  auto m = std::make_shared<MachineSpec>(names, numbered_symbols(A), std::vector<TapeRole>{TapeRole::work, TapeRole::work},
                                         Dmax, 0, std::vector<StateId>{});
  Symbol read[2], write[2];
  Move move[2];
  for (Symbol sa = 0; sa < N; ++sa) {
    for (Symbol sb = 0; sb < N; ++sb) {
      read[0] = write[0] = sa;
      read[1] = write[1] = sb;
      for (StateId q = 0; q < names.size(); ++q) {
        write[0] = sa;
        move[0] = move[1] = 0;
        StateId next = q + 1;
        if (q >= 3 && q < F) {
          if (!acc) {
            move[0] = 1;
            move[1] = static_cast<Move>(2 * from_twos_complement(sa, A));
          }
        } else if (q == F) {
          write[0] = sb;
          move[1] = 1;
        } else if (q == U) {
          move[0] = -static_cast<Move>(k);
          move[1] = static_cast<Move>(from_twos_complement(sb, A));
          next = 0;
        }
        m->set_action(q, read, write, move, next);
      }
    }
  }
  if (acc) {
    FastAccumulator fa;
    fa.trigger_state = 3;
    fa.source_tape = 0;
    fa.inputs = k;
    fa.target_tape = 1;
    fa.stride = 2;
    fa.value_bits = A;
    fa.next_state = F;
    m->attach_accumulator(fa);
  }
  m->finalize();
  return m;
}

MachinePtr build_synapse_machine(std::size_t k, unsigned A, bool acc) {
  check_width(A);
  std::vector<std::string> names{"S1", "S2", "S3"};
  const std::size_t waits = acc ? 3 : k + 2;
  for (std::size_t j = 0; j < waits; ++j) names.push_back("X" + std::to_string(j + 1));
  const Symbol N = Symbol{1} << A;
  auto m = std::make_shared<MachineSpec>(names, numbered_symbols(A), std::vector<TapeRole>{TapeRole::work, TapeRole::work},
                                         static_cast<Move>(N), 0, std::vector<StateId>{});
  Symbol read[2], write[2];
  Move move[2];
  for (Symbol sa = 0; sa < N; ++sa) {
    for (Symbol sb = 0; sb < N; ++sb) {
      read[0] = sa;
      read[1] = write[1] = sb;
      for (StateId q = 0; q < names.size(); ++q) {
        write[0] = sa;
        move[0] = move[1] = 0;
        const StateId next = (q + 1) % names.size();
        if (q == 0) {
          move[0] = 1;
          move[1] = 1 + (sa ? 1 : 0);
        } else if (q == 1) {
          move[1] = static_cast<Move>(from_twos_complement(sb, A));
        } else if (q == 2) {
          write[0] = sb;
          move[0] = -1;
        }
        m->set_action(q, read, write, move, next);
      }
    }
  }
  m->finalize();
  return m;
}

Symbol encode(std::int64_t v, unsigned A, const char* what) {
  if (!fits_twos_complement(v, A))
    throw Error(ErrorKind::capacity, std::string(what) + " " + std::to_string(v) + " does not fit " + std::to_string(A) + " bits");
  return static_cast<Symbol>(to_twos_complement(v, A));
}

}  // namespace

MachinePtr neural_node_machine(std::size_t k_max, unsigned A, bool accumulator) {
  return cached({k_max, A, accumulator, true}, &build_node_machine);
}

MachinePtr neural_synapse_machine(std::size_t k_max, unsigned A, bool accumulator) {
  return cached({k_max, A, accumulator, false}, &build_synapse_machine);
}

NeuralEmulator build_neural_emulator(const NeuralNetSpec& net, std::size_t N_max, std::size_t k_max, bool accumulator) {
  net.validate();
  const unsigned A = net.accumulator_bits;
  if (net.nodes.size() > N_max) throw Error(ErrorKind::capacity, "net has more nodes than N_max");
  if (net.max_in_degree() > k_max) throw Error(ErrorKind::capacity, "a node has more synapses than k_max");

  NeuralEmulator em;
  em.N_max = N_max;
  em.k_max = k_max;
  em.accumulator = accumulator;
  em.A = A;
  em.steps_per_tick = accumulator ? 6 : k_max + 5;
  em.node_machine = neural_node_machine(k_max, A, accumulator);
  em.synapse_machine = neural_synapse_machine(k_max, A, accumulator);
  em.net = &net;

  for (std::size_t i = 0; i < N_max; ++i) {
    Configuration c = Configuration::initial(em.node_machine);
    if (i < net.nodes.size()) {
      const auto& node = net.nodes[i];
      std::vector<Symbol> alpha(k_max + 1, 0);
      alpha[k_max] = static_cast<Symbol>(node.initial_state);
      std::vector<Symbol> beta;
      for (std::size_t r = 0; r < node.table.size(); ++r) {
        const std::int64_t off = 2 * (node.table[r].next_potential - node.potential_min) - static_cast<std::int64_t>(2 * r + 1);
        beta.push_back(static_cast<Symbol>(node.table[r].fire));
        beta.push_back(encode(off, A, "node offset"));
      }
      c.load(0, alpha);
      c.load(1, beta);
      c.tapes[1].head = 2 * (node.initial_potential - node.potential_min);
    }
    em.ensemble.add(std::move(c));
  }

  std::vector<std::vector<std::size_t>> in(N_max);
  for (std::size_t n = 0; n < net.nodes.size(); ++n) in[n] = net.incoming(n);
  for (std::size_t n = 0; n < N_max; ++n) {
    for (std::size_t j = 0; j < k_max; ++j) {
      Configuration c = Configuration::initial(em.synapse_machine);
      if (j < in[n].size()) {
        const auto& syn = net.synapses[in[n][j]];
        const Symbol alpha[2] = {static_cast<Symbol>(net.nodes[syn.origin].initial_state), 0};
        std::vector<Symbol> beta;
        for (std::size_t s = 0; s < syn.table.size(); ++s) {
          beta.push_back(encode(syn.table[s].activation, A, "activation"));
          for (int eta = 0; eta < 2; ++eta) {
            const std::int64_t off = 3 * static_cast<std::int64_t>(syn.table[s].next[eta]) - static_cast<std::int64_t>(3 * s + 1 + eta);
            beta.push_back(encode(off, A, "synapse offset"));
          }
        }
        c.load(0, alpha);
        c.load(1, beta);
        c.tapes[1].head = static_cast<Position>(3 * syn.initial);
      }
      const std::size_t id = em.ensemble.add(std::move(c));
      if (id != em.synapse_id(n, j)) throw Error(ErrorKind::invalid_argument, "synapse slot numbering broke");
      if (j < in[n].size()) {
        const auto& syn = net.synapses[in[n][j]];
        em.ensemble.alias(CellAlias{id, 0, 0, em.node_id(syn.origin), 0, static_cast<Position>(k_max), 1});
        em.ensemble.alias(CellAlias{id, 0, 1, em.node_id(n), 0, static_cast<Position>(j), 1});
      }
    }
  }

  NeuralCostModel& m = em.model;
  m = direct_cost_model(net, 0, accumulator);
  m.N_max = static_cast<double>(N_max);
  m.k_max = static_cast<double>(k_max);
  m.gamma = static_cast<double>(em.steps_per_tick);
  const CostModel node_cost(*em.node_machine), syn_cost(*em.synapse_machine);
  m.alpha_B = node_cost.table_bits() + node_cost.state_bits();
  m.alpha_syn = syn_cost.table_bits() + syn_cost.state_bits();
  m.alpha_A = accumulator ? FastAccumulator::logic_bits(A) : 0.0;
  m.epsilon_A = 0;
  m.beta = 0;
  for (std::size_t n = 0; n < net.nodes.size(); ++n) {
    const auto& c = em.ensemble.config(em.node_id(n));
    const double tapes = tape_information(c.tapes[0].leased_count(), A) + tape_information(c.tapes[1].leased_count(), A);
    m.epsilon_B = std::max(m.epsilon_B, tapes - m.I_B);
  }
  for (std::size_t n = 0; n < net.nodes.size(); ++n) {
    for (std::size_t j = 0; j < in[n].size(); ++j) {
      const auto& c = em.ensemble.config(em.synapse_id(n, j));
      const double tapes = tape_information(c.tapes[0].leased_count(), A) + tape_information(c.tapes[1].leased_count(), A);
      m.epsilon_syn = std::max(m.epsilon_syn, tapes - m.I_syn);
    }
  }
  return em;
}

NeuralState NeuralEmulator::state() const {
  NeuralState s;
  for (std::size_t n = 0; n < net->nodes.size(); ++n) {
    const auto& c = ensemble.config(node_id(n));
    s.eta.push_back(static_cast<int>(c.tapes[0].read_at(static_cast<Position>(k_max))));
    s.potential.push_back(c.tapes[1].head / 2 + net->nodes[n].potential_min);
  }
  s.synapse_state.assign(net->synapses.size(), 0);
  for (std::size_t n = 0; n < net->nodes.size(); ++n) {
    const auto in = net->incoming(n);
    for (std::size_t j = 0; j < in.size(); ++j)
      s.synapse_state[in[j]] = static_cast<std::size_t>(ensemble.config(synapse_id(n, j)).tapes[1].head / 3);
  }
  return s;
}

void NeuralEmulator::run_ticks(std::size_t ticks) {
  for (std::size_t t = 0; t < ticks * steps_per_tick; ++t) ensemble.tick();
}

EmulatedRun emulate_net(const NeuralNetSpec& net, std::size_t ticks, std::size_t N_max, std::size_t k_max,
                        bool accumulator) {
  NeuralEmulator em = build_neural_emulator(net, N_max, k_max, accumulator);
  EmulatedRun r;
  r.trajectory.push_back(em.state());
  for (std::size_t t = 0; t < ticks; ++t) {
    em.run_ticks(1);
    r.trajectory.push_back(em.state());
  }
  r.cost = em.ensemble.total_cost();
  r.lockstep_ticks = em.ensemble.ticks();
  r.model = em.model;
  r.model.Lambda = static_cast<double>(ticks);
  r.bound = neural_cost_bound(r.model);
  return r;
}

json cost_model_to_json(const NeuralCostModel& m) {
  return json{{"Lambda", m.Lambda},   {"N", m.N},
              {"k", m.k},             {"N_max", m.N_max},
              {"k_max", m.k_max},     {"origin_population", m.origin_population},
              {"I_B", m.I_B},         {"I_syn", m.I_syn},
              {"I_A", m.I_A},         {"I_node", m.I_node()},
              {"alpha_B", m.alpha_B}, {"alpha_A", m.alpha_A},
              {"alpha_syn", m.alpha_syn}, {"epsilon_B", m.epsilon_B},
              {"epsilon_A", m.epsilon_A}, {"epsilon_syn", m.epsilon_syn},
              {"beta", m.beta},       {"gamma", m.gamma}};
}

}  // namespace workfn
