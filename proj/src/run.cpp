#include "workfn/run.h"

namespace workfn {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::halted: return "halted";
    case StopReason::sleeping: return "sleeping";
    case StopReason::budget_exceeded: return "budget_exceeded";
    case StopReason::step_limit: return "step_limit";
  }
  return "?";
}

StopReason run(Configuration& config, const CostModel& model, CostLedger& ledger, const RunLimits& limits,
               const StepObserver& observer) {
  const double start = ledger.total_bits();
  std::uint64_t executed = 0;
  for (;;) {
    if (config.status == Status::halted) return StopReason::halted;
    if (config.status == Status::sleeping && !wake(config)) return StopReason::sleeping;
    if (config.status == Status::budget_exceeded) return StopReason::budget_exceeded;
    if (executed >= limits.max_steps) return StopReason::step_limit;

    const double spent = ledger.total_bits() - start;
    const double next = model.information_for(leased_after_step(config)).total();
    if (spent >= limits.budget_bits || spent + next > limits.budget_bits) {
      config.status = Status::budget_exceeded;
      return StopReason::budget_exceeded;
    }
    const StepEffect effect = step(config);
    ledger.charge(config.steps, model.information(config));
    ++executed;
    if (observer) observer(config, effect);
  }
}

}  // namespace workfn
