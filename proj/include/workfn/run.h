#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "workfn/cost.h"
#include "workfn/machine.h"

namespace workfn {

struct RunLimits {
  double budget_bits = std::numeric_limits<double>::infinity();
  std::uint64_t max_steps = std::numeric_limits<std::uint64_t>::max();
};

enum class StopReason { halted, sleeping, budget_exceeded, step_limit };

const char* to_string(StopReason r);

using StepObserver = std::function<void(const Configuration&, const StepEffect&)>;

// Steps and charges the ledger until the machine halts, falls asleep, hits
// the step cap, or the next step would push the cost of this run past
// `budget_bits`. A step is only executed if its post-step information still
// fits the budget, so a machine with I(1) > budget executes nothing.
StopReason run(Configuration& config, const CostModel& model, CostLedger& ledger,
               const RunLimits& limits = {}, const StepObserver& observer = {});

}  // namespace workfn
