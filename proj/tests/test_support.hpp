#pragma once

// Shared helpers for the test suites: seeded random game generation, the
// worked reduction example, and independent oracles (dense linear solve,
// strategy enumeration) that deliberately avoid the library's own solvers.

#include <cstdint>
#include <random>
#include <vector>

#include "decgame/model.hpp"
#include "decgame/pmdp.hpp"

namespace decgame::testing {

struct RandomGameOptions {
    int max_deceiver_states = 5;
    int max_infiltrator_states = 8;
    int max_actions = 3;
    int max_observations = 4;
    double max_abs_cost = 5.0;
    double min_discount = 0.5;
    double max_discount = 0.9;
    bool allow_targets = true;
    bool acyclic = false;  // layered games (used by the affinity property)
};

/// Valid random bipartite game; probabilities are small exact rationals.
OneSidedPosg random_game(std::uint64_t seed, const RandomGameOptions& options = {});

/// Random memoryless strategy rows on every observation of the game.
InfiltratorStrategy random_strategy(const OneSidedPosg& posg, std::uint64_t seed);

/// Random deterministic deceiver choice at every deceiver state.
DeceiverStrategy random_deceiver(const OneSidedPosg& posg, std::uint64_t seed);

/// Random well-defined instantiation for a reduction pMDP.
Instantiation random_instantiation(const ParametricMdp& pmdp, std::uint64_t seed);

/// The six-state worked example: infiltrator states s0 (3 actions, its own
/// observation) and s1, s3 (2 actions, shared observation); deceiver states
/// s2, s4, s5 with Dirac actions.
OneSidedPosg fig4_game();

/// Dense Gaussian-elimination solve of the evaluation fixed point for fixed
/// strategies; independent of the iterative path.
std::vector<double> linear_solve_cost(const OneSidedPosg& posg, const DeceiverStrategy& d,
                                      const InfiltratorStrategy& s);

/// Minimum over all deterministic deceiver strategies of evaluate_cost at
/// the initial state, by full enumeration.
double enumerate_min_value(const OneSidedPosg& posg, const InfiltratorStrategy& s);

/// All deterministic deceiver strategies (product over non-target deceiver
/// states; targets and forced states fixed to the smallest action).
std::vector<DeceiverStrategy> all_deceiver_strategies(const OneSidedPosg& posg);

}  // namespace decgame::testing
