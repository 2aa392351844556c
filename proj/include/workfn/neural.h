#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "workfn/ensemble.h"
#include "workfn/machine.h"

namespace workfn {

// Node: a potential v in [potential_min, potential_min + rows). Each tick the
// incoming activations are added to v, then row v gives the new spike state
// and the potential carried into the next tick.
struct NeuralNode {
  struct Row {
    int fire = 0;  // 0 or 1
    std::int64_t next_potential = 0;
  };
  std::vector<Row> table;
  std::int64_t potential_min = 0;
  std::int64_t initial_potential = 0;
  int initial_state = 0;
};

// Synapse with states 0..rows-1. Each tick it moves to next[eta] of its
// origin node's previous spike state and emits the activation of the new state.
struct NeuralSynapse {
  struct Row {
    std::int64_t activation = 0;
    std::size_t next[2] = {0, 0};
  };
  std::size_t origin = 0;
  std::size_t target = 0;
  std::vector<Row> table;
  std::size_t initial = 0;
};

struct NeuralNetSpec {
  std::vector<NeuralNode> nodes;
  std::vector<NeuralSynapse> synapses;
  unsigned accumulator_bits = 8;  // A: activation width, two's complement

  void validate() const;
  std::size_t max_in_degree() const;
  // Incoming synapse ids of a node in declaration order.
  std::vector<std::size_t> incoming(std::size_t node) const;
};

NeuralNetSpec load_net(const nlohmann::json& doc);
nlohmann::json net_to_json(const NeuralNetSpec& net);

struct NeuralState {
  std::vector<int> eta;
  std::vector<std::int64_t> potential;
  std::vector<std::size_t> synapse_state;
  bool operator==(const NeuralState&) const = default;
};

NeuralState initial_state(const NeuralNetSpec& net);
// One tick; throws Error(invalid_argument) if a potential leaves its table.
NeuralState advance(const NeuralNetSpec& net, const NeuralState& s);

// Complexities and emulator constants. N is the node count of the factor
// Lambda*N; origin_population is the N inside log2(N).
struct NeuralCostModel {
  double Lambda = 0;
  double N = 0;
  double k = 0;
  double N_max = 0;
  double k_max = 0;
  double origin_population = 1;
  double I_B = 0;
  double I_syn = 0;
  double I_A = 0;
  double alpha_B = 0, alpha_A = 0, alpha_syn = 0;
  double epsilon_B = 0, epsilon_A = 0, epsilon_syn = 0;
  double beta = 0;
  double gamma = 6;  // lockstep steps per net tick

  double I_node() const { return I_B + k * I_A; }
};

// C = Lambda N (I_node + k (I_syn + log2(N))).
double neural_direct_cost(const NeuralCostModel& m);

struct NeuralBound {
  double full = 0;
  double simplified = 0;  // gamma C + gamma Lambda N (eps terms) + unused-capacity term + beta
};
NeuralBound neural_cost_bound(const NeuralCostModel& m);

// Table information of the node body and synapse: rows * (field bits) + row
// index bits, taking the largest over the net.
double node_table_bits(const NeuralNode& node);
double synapse_table_bits(const NeuralSynapse& syn, unsigned A);
NeuralCostModel direct_cost_model(const NeuralNetSpec& net, double ticks, bool accumulator);

struct DirectRun {
  std::vector<NeuralState> trajectory;  // initial state then one per tick
  NeuralCostModel model;
  double cost = 0;
};
DirectRun simulate_direct(const NeuralNetSpec& net, std::size_t ticks, bool accumulator = true);

struct NeuralEmulator {
  Ensemble ensemble;
  std::size_t N_max = 0;
  std::size_t k_max = 0;
  bool accumulator = false;
  unsigned A = 8;
  std::size_t steps_per_tick = 0;
  MachinePtr node_machine;
  MachinePtr synapse_machine;
  NeuralCostModel model;  // constants measured from the construction; Lambda = 0
  const NeuralNetSpec* net = nullptr;

  std::size_t node_id(std::size_t node) const { return node; }
  std::size_t synapse_id(std::size_t node, std::size_t slot) const { return N_max + node * k_max + slot; }
  // Node and synapse states read back from the machines' tapes.
  NeuralState state() const;
  void run_ticks(std::size_t ticks);
};

// Generic node/synapse machines, shared per (k_max, A, accumulator).
MachinePtr neural_node_machine(std::size_t k_max, unsigned A, bool accumulator);
MachinePtr neural_synapse_machine(std::size_t k_max, unsigned A, bool accumulator);

// One dual-tape machine per node slot and per synapse slot; unused slots run
// with empty tapes. `net` must outlive the emulator.
NeuralEmulator build_neural_emulator(const NeuralNetSpec& net, std::size_t N_max, std::size_t k_max, bool accumulator);

struct EmulatedRun {
  std::vector<NeuralState> trajectory;
  double cost = 0;  // ensemble ledger with shared fields counted once
  NeuralCostModel model;
  NeuralBound bound;
  std::uint64_t lockstep_ticks = 0;
};
EmulatedRun emulate_net(const NeuralNetSpec& net, std::size_t ticks, std::size_t N_max, std::size_t k_max,
                        bool accumulator);

nlohmann::json cost_model_to_json(const NeuralCostModel& m);

}  // namespace workfn
