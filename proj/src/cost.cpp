#include "workfn/cost.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace workfn {

using nlohmann::json;

double fsm_size(std::uint64_t M, std::uint64_t N, std::uint64_t D, std::size_t tapes) {
  if (M == 0 || N == 0 || D == 0 || tapes == 0)
    throw Error(ErrorKind::invalid_argument, "fsm_size needs M, N, D, t >= 1");
  const double m = ceil_log2(M), n = ceil_log2(N), d = ceil_log2(D);
  const double rows = static_cast<double>(M) * std::pow(static_cast<double>(N), static_cast<double>(tapes));
  return rows * (m + static_cast<double>(tapes) * (n + d)) + m;
}

double fsm_size(const MachineSpec& spec) {
  return fsm_size(spec.state_count(), spec.symbol_count(), spec.move_count(), spec.tape_count());
}

double packed_table_bits(const MachineSpec& spec) {
  const std::size_t t = spec.tape_count();
  std::vector<std::set<Symbol>> writes(t);
  std::vector<std::set<Move>> moves(t);
  std::uint64_t executable = 0;
  std::vector<Symbol> read;
  for (std::uint64_t idx = 0; idx < spec.entry_count(); ++idx) {
    StateId state;
    spec.decode_entry(idx, state, read);
    if (spec.is_halt(state)) continue;
    ++executable;
    const auto act = spec.entry(idx);
    for (std::size_t i = 0; i < t; ++i) {
      writes[i].insert(act.write[i]);
      moves[i].insert(act.move[i]);
    }
  }
  double per_entry = spec.state_bits();
  for (std::size_t i = 0; i < t; ++i) {
    if (!writes[i].empty()) per_entry += ceil_log2(writes[i].size());
    if (!moves[i].empty()) per_entry += ceil_log2(moves[i].size());
  }
  return static_cast<double>(executable) * per_entry;
}

double counter_cost(unsigned width) {
  if (width < 1) throw Error(ErrorKind::invalid_argument, "counter width must be >= 1");
  return 17.0 * width - 9.0;
}

double head_cost_per_step(std::uint64_t M, std::uint64_t N, std::uint64_t D) {
  if (M < 2 || N < 2 || D < 2)
    throw Error(ErrorKind::invalid_argument, "head cost needs M, N, D >= 2 (zero-width counters)");
  const unsigned m = ceil_log2(M), n = ceil_log2(N), d = ceil_log2(D);
  return 2.0 * n + static_cast<double>(M) * counter_cost(m) + static_cast<double>(N) * counter_cost(n) +
         static_cast<double>(D) * counter_cost(d);
}

json to_json(const Breakdown& b) {
  return json{{"table", b.table_bits},
              {"state", b.state_bits},
              {"head_position", b.head_position_bits},
              {"tape_content", b.tape_content_bits},
              {"head_cost", b.head_cost_bits},
              {"device", b.device_bits}};
}

CostModel::CostModel(const MachineSpec& spec, CostOptions options) : options_(options) {
  state_bits_ = spec.state_bits();
  if (options.table_mode == TableSizeMode::formula) {
    table_bits_ = fsm_size(spec) - state_bits_;
  } else {
    table_bits_ = packed_table_bits(spec);
  }
  if (options.include_head_cost) head_bits_ = head_cost_per_step(spec.state_count(), spec.symbol_count(), spec.move_count());
  if (const auto& acc = spec.accumulator())
    device_bits_ = static_cast<double>(acc->inputs) * FastAccumulator::logic_bits(acc->value_bits);
  for (std::size_t i = 0; i < spec.tape_count(); ++i) {
    charged_.push_back(spec.tape_role(i) == TapeRole::work);
    cell_bits_.push_back(ceil_log2(spec.tape_alphabet(i)));
  }
}

Breakdown CostModel::information_for(std::span<const std::size_t> leased) const {
  Breakdown b;
  b.table_bits = table_bits_;
  b.state_bits = state_bits_;
  b.head_cost_bits = head_bits_;
  b.device_bits = device_bits_;
  for (std::size_t i = 0; i < leased.size(); ++i) {
    if (!charged_[i]) continue;
    b.head_position_bits += ceil_log2(leased[i] + 1);
    b.tape_content_bits += static_cast<double>(leased[i]) * cell_bits_[i];
  }
  return b;
}

Breakdown CostModel::information(const Configuration& config) const {
  std::vector<std::size_t> leased(config.tapes.size());
  for (std::size_t i = 0; i < leased.size(); ++i) leased[i] = config.tapes[i].leased_count();
  return information_for(leased);
}

void CostLedger::charge(std::uint64_t lambda, const Breakdown& b) {
  const double bits = b.total();
  records_.push_back(StepRecord{lambda, bits, b});
  total_ += bits;
}

CostLedger accumulate(std::span<const Configuration> trace, const CostModel& model) {
  CostLedger ledger;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].steps > trace[i - 1].steps) ledger.charge(trace[i].steps, model.information(trace[i]));
  }
  return ledger;
}

double ensemble_cost(std::span<const MachineCost> machines, std::span<const SharedRegion> regions) {
  std::map<std::size_t, const MachineCost*> by_id;
  double total = 0;
  for (const auto& m : machines) {
    if (!by_id.emplace(m.machine, &m).second) throw Error(ErrorKind::invalid_argument, "duplicate machine id");
    total += m.total_bits;
  }
  for (const auto& region : regions) {
    const MachineCost* owner = nullptr;
    for (std::size_t id : region.machines) {
      auto it = by_id.find(id);
      if (it == by_id.end())
        throw Error(ErrorKind::invalid_argument, "shared region references unknown machine " + std::to_string(id));
      const MachineCost* c = it->second;
      if (!owner || c->steps > owner->steps || (c->steps == owner->steps && c->machine < owner->machine)) owner = c;
    }
    for (std::size_t id : region.machines) {
      const MachineCost* c = by_id.at(id);
      if (c == owner) continue;
      total -= static_cast<double>(region.cells) * region.bits_per_cell * static_cast<double>(c->steps);
    }
  }
  return total;
}

std::string ledger_to_jsonl(const CostLedger& ledger, std::size_t machine_id) {
  std::ostringstream os;
  for (const auto& r : ledger.records()) {
    json rec{{"machine", machine_id}, {"lambda", r.lambda}, {"bits", r.bits}, {"breakdown", to_json(r.breakdown)}};
    os << rec.dump() << '\n';
  }
  return os.str();
}

std::string ledger_to_csv(const CostLedger& ledger, std::size_t machine_id, bool header) {
  std::ostringstream os;
  os.precision(17);
  if (header) os << "machine,lambda,bits,table,state,head_position,tape_content,head_cost,device\n";
  for (const auto& r : ledger.records()) {
    const auto& b = r.breakdown;
    os << machine_id << ',' << r.lambda << ',' << r.bits << ',' << b.table_bits << ',' << b.state_bits << ','
       << b.head_position_bits << ',' << b.tape_content_bits << ',' << b.head_cost_bits << ',' << b.device_bits
       << '\n';
  }
  return os.str();
}

}  // namespace workfn
