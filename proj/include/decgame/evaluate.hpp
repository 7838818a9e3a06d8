#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "decgame/model.hpp"

namespace decgame {

/// Markov chain induced by fixing both strategies. Player tags are kept
/// because the discount applies on deceiver rows only; target states are
/// made absorbing with zero cost.
struct InducedChain {
    int num_states = 0;
    int initial = 0;
    double discount = 0.0;
    std::vector<Player> player;
    std::vector<char> is_target;
    std::vector<double> cost;                                   // per state
    std::vector<std::vector<std::pair<int, double>>> succ;      // per state
};

/// Builds the chain for (posg, deceiver strategy d, memoryless infiltrator
/// strategy s). Throws StrategyError naming the state when a reachable state
/// lacks a strategy entry. States that are unreachable from the initial
/// state and lack an entry become absorbing with zero cost.
InducedChain induced_chain(const OneSidedPosg& posg, const DeceiverStrategy& d,
                           const InfiltratorStrategy& s);

/// Unique fixed point of the discounted cost equations on the chain:
/// deceiver rows carry the discount, infiltrator rows do not, targets pin 0.
CostVector chain_cost(const InducedChain& chain);

/// Expected discounted cost-to-target for fixed strategies.
CostVector evaluate_cost(const OneSidedPosg& posg, const DeceiverStrategy& d,
                         const InfiltratorStrategy& s);

/// Evaluates a fixed deceiver strategy on a game whose infiltrator states
/// have exactly one enabled action (e.g. an instantiated reduction MDP).
CostVector evaluate_cost_mdp(const OneSidedPosg& mdp, const DeceiverStrategy& d);

/// Deceiver best response to a fixed infiltrator strategy: value iteration
/// minimizing over enabled actions at every deceiver state. Ties pick the
/// smallest action index.
std::pair<DeceiverStrategy, CostVector> best_response_deceiver(const OneSidedPosg& posg,
                                                               const InfiltratorStrategy& s);

/// Best response where some deceiver states are pinned to a fixed action
/// (choice >= 0) and the rest minimize freely. Used by the branch-and-bound
/// node bounds.
std::pair<DeceiverStrategy, CostVector> best_response_pinned(const OneSidedPosg& posg,
                                                             const InfiltratorStrategy& s,
                                                             const DeceiverStrategy& pinned);

/// Max over the strategy list of evaluate_cost at the initial state, and the
/// smallest attaining index.
std::pair<double, int> worst_case_value(const OneSidedPosg& posg, const DeceiverStrategy& d,
                                        const std::vector<InfiltratorStrategy>& strategies);

/// Normalized infiltrator row for an observation; checks support and
/// normalization. Throws StrategyError on problems.
const std::vector<std::pair<int, double>>& infiltrator_row(const OneSidedPosg& posg,
                                                           const InfiltratorStrategy& s, int state);

namespace detail {
/// Iteration control shared by the fixed-point solvers.
constexpr double kFixedPointResidual = 1e-10;
constexpr long kFixedPointMaxSweeps = 1000000;
}  // namespace detail

}  // namespace decgame
