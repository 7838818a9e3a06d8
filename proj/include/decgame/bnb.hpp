#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "decgame/milp.hpp"
#include "decgame/model.hpp"

namespace decgame {

struct BnbResult {
    DeceiverStrategy strategy;
    double value = 0.0;
    int attaining_index = -1;
    long nodes_explored = 0;
    double proof_gap = 0.0;
};

/// Node trace hook for bound diagnostics: (depth, lower_bound, pruned).
using BnbObserver = std::function<void(int, double, bool)>;

/// Exact depth-first branch and bound over the deceiver's action choices.
/// Branches one unassigned deceiver state per node (descending action count,
/// then index); node lower bounds come from per-strategy minimizing DPs with
/// the branch prefix pinned, upper bounds from exact evaluation of the
/// greedy completion. Prunes at incumbent - 1e-9.
BnbResult solve_milp_bnb(const OneSidedPosg& posg,
                         const std::vector<InfiltratorStrategy>& strategies,
                         const MilpProblem& problem, const BnbObserver& observer = nullptr);

/// Enumerates every deterministic deceiver strategy (product over non-target
/// deceiver states, guarded at 1e6) and returns the lexicographically first
/// minimizer of the worst-case value.
std::pair<DeceiverStrategy, double> brute_force_robust(
    const OneSidedPosg& posg, const std::vector<InfiltratorStrategy>& strategies);

}  // namespace decgame
