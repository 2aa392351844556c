#pragma once

#include "workfn/machine.h"

namespace workfn {

// Rewrites a single-tape skip machine into an equivalent machine whose head
// moves at most one cell per step. A move of k > 1 cells becomes one move
// plus k-1 steps through "travel" states that remember the destination state
// and the remaining distance, write back what they read and move on.
// Only travel states that some entry actually uses are created.
MachinePtr expand_skips(const MachineSpec& spec);

}  // namespace workfn
