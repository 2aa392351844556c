#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "workfn/machine.h"

namespace workfn {

// Action-table size in bits, state register included:
//   t == 1: M*N*(m + n + d) + m
//   t  > 1: M*N^t*(m + t*(n + d)) + m
double fsm_size(std::uint64_t M, std::uint64_t N, std::uint64_t D, std::size_t tapes = 1);
double fsm_size(const MachineSpec& spec);

// Bit width of the literal table encoding: one entry per executable
// (state, read-vector), each holding the next state plus, per tape, only as
// many bits as the distinct written symbols and moves actually used need.
// Tit-for-Tat packs into 9 entries of 4 bits.
double packed_table_bits(const MachineSpec& spec);

// Per-step cost of operating the head: 2n + M(17m-9) + N(17n-9) + D(17d-9).
// All of M, N, D must be >= 2.
double head_cost_per_step(std::uint64_t M, std::uint64_t N, std::uint64_t D);

// Counter plus zero comparator of width w: 17w - 9 bits.
double counter_cost(unsigned width);

enum class TableSizeMode { formula, packed };

struct CostOptions {
  TableSizeMode table_mode = TableSizeMode::formula;
  bool include_head_cost = false;
};

struct Breakdown {
  double table_bits = 0;
  double state_bits = 0;
  double head_position_bits = 0;
  double tape_content_bits = 0;
  double head_cost_bits = 0;
  double device_bits = 0;

  double total() const {
    return table_bits + state_bits + head_position_bits + tape_content_bits + head_cost_bits + device_bits;
  }
};

nlohmann::json to_json(const Breakdown& b);

// Instantaneous information I(lambda) of a configuration: action table,
// state register, and for every work tape ceil_log2(U+1) head-position bits
// plus U cells of ceil_log2(alphabet) bits, U being the leased cell count.
// Run and valuation tapes are not charged.
class CostModel {
 public:
  explicit CostModel(const MachineSpec& spec, CostOptions options = {});

  Breakdown information(const Configuration& config) const;
  Breakdown information_for(std::span<const std::size_t> leased_per_tape) const;

  double table_bits() const { return table_bits_; }
  double state_bits() const { return state_bits_; }
  // Fixed per-step bits: table, state, head operation, attached devices.
  double fixed_bits() const { return table_bits_ + state_bits_ + head_bits_ + device_bits_; }
  double cell_bits(std::size_t tape) const { return cell_bits_[tape]; }
  bool charged(std::size_t tape) const { return charged_[tape]; }
  const CostOptions& options() const { return options_; }

 private:
  CostOptions options_;
  double table_bits_ = 0;
  double state_bits_ = 0;
  double head_bits_ = 0;
  double device_bits_ = 0;
  std::vector<double> cell_bits_;
  std::vector<bool> charged_;
};

struct StepRecord {
  std::uint64_t lambda;
  double bits;
  Breakdown breakdown;
};

// Per-step information and the accumulated cost C = sum of I(lambda).
class CostLedger {
 public:
  void charge(std::uint64_t lambda, const Breakdown& b);

  double total_bits() const { return total_; }
  std::uint64_t step_count() const { return records_.size(); }
  const std::vector<StepRecord>& records() const { return records_; }

 private:
  std::vector<StepRecord> records_;
  double total_ = 0;
};

// Builds a ledger from a scheduler trace: element 0 is the initial
// configuration (not charged); every later element whose step count grew is
// charged at its post-step information. Sleeping entries add nothing.
CostLedger accumulate(std::span<const Configuration> trace, const CostModel& model);

// Shared memory counted once: `cells` cells of `bits_per_cell` bits that
// appear in the ledgers of every listed machine.
struct SharedRegion {
  std::size_t cells = 0;
  double bits_per_cell = 0;
  std::vector<std::size_t> machines;
};

struct MachineCost {
  std::size_t machine;
  double total_bits;
  std::uint64_t steps;
};

// Sum of per-machine costs where every shared region is charged only to the
// sharing machine with the most steps (lowest id on ties); the other sharers
// get cells * bits_per_cell subtracted per executed step.
double ensemble_cost(std::span<const MachineCost> machines, std::span<const SharedRegion> regions);

// One JSON-lines record per step: {"machine", "lambda", "bits", "breakdown"}.
std::string ledger_to_jsonl(const CostLedger& ledger, std::size_t machine_id);
std::string ledger_to_csv(const CostLedger& ledger, std::size_t machine_id, bool header = true);

}  // namespace workfn
