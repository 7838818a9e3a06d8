#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "decgame/rational.hpp"

namespace decgame {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A model violates its structural invariants where a valid model is required.
struct ModelError : Error { using Error::Error; };
/// A strategy is missing an entry for a reachable state/observation, or puts
/// probability on a disabled action.
struct StrategyError : Error { using Error::Error; };
/// A parameter instantiation does not yield probability distributions.
struct InstantiationError : Error { using Error::Error; };
/// Bad argument values (k = 0, empty strategy list, guard exceeded, ...).
struct DomainError : Error { using Error::Error; };
/// File or format problems.
struct IoError : Error { using Error::Error; };
/// Conditions that indicate a bug rather than bad input.
struct InternalError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Game model
// ---------------------------------------------------------------------------

enum class Player { Deceiver, Infiltrator };

/// One enabled action at a state: immediate cost plus a sparse distribution
/// over successor states. Probabilities are exact rationals.
struct ActionRow {
    int action = -1;
    double cost = 0.0;
    std::vector<std::pair<int, Rational>> successors;
};

/// Turn-based stochastic game over deceiver states and infiltrator states.
/// Transitions alternate between the two sides; the discount factor is
/// applied on deceiver transitions only.
struct StochasticGame {
    std::vector<std::string> state_names;
    std::vector<Player> player;                  // per state
    std::vector<std::vector<ActionRow>> rows;    // per state, sorted by action id
    std::vector<std::string> action_names;
    int initial = 0;
    double discount = 0.0;

    int num_states() const { return static_cast<int>(state_names.size()); }
    int num_actions() const { return static_cast<int>(action_names.size()); }
    bool is_deceiver(int s) const { return player[s] == Player::Deceiver; }

    const ActionRow* find_row(int s, int a) const {
        for (const auto& row : rows[s])
            if (row.action == a) return &row;
        return nullptr;
    }
    /// Enabled action ids at s, ascending.
    std::vector<int> enabled_actions(int s) const {
        std::vector<int> out;
        out.reserve(rows[s].size());
        for (const auto& row : rows[s]) out.push_back(row.action);
        return out;
    }

    int state_index(const std::string& name) const;
    int action_index(const std::string& name) const;
};

/// Stochastic game plus the infiltrator's observation structure and the
/// target set. The deceiver observes states directly; obs_of is defined on
/// infiltrator states only (-1 elsewhere).
struct OneSidedPosg {
    StochasticGame game;
    std::vector<std::string> observation_names;
    std::vector<int> obs_of;        // per state; -1 for deceiver states
    std::vector<char> is_target;    // per state

    int num_observations() const { return static_cast<int>(observation_names.size()); }
    int observation_index(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

/// Randomized memoryless observation-based infiltrator strategy: one
/// probability row per observation. memory_nodes records the memory size the
/// strategy realizes when it lives on an unfolded game (1 = memoryless).
struct InfiltratorStrategy {
    // rows[z] = list of (action, probability), ascending by action id.
    std::vector<std::vector<std::pair<int, double>>> rows;
    int memory_nodes = 1;

    bool has_row(int obs) const {
        return obs >= 0 && obs < static_cast<int>(rows.size()) && !rows[obs].empty();
    }
};

/// Deterministic state-based deceiver strategy; one action per deceiver
/// state (-1 where unset / infiltrator states).
struct DeceiverStrategy {
    std::vector<int> choice;

    bool has_choice(int s) const {
        return s >= 0 && s < static_cast<int>(choice.size()) && choice[s] >= 0;
    }
};

/// Finite-state controller realizing a finite-memory observation-based
/// strategy: an action distribution per (node, observation) and a memory
/// update distribution per (node, observation, action).
struct FiniteStateController {
    int num_nodes = 1;
    int initial_node = 0;
    // action_map[node][obs] = list of (action, prob)
    std::vector<std::vector<std::vector<std::pair<int, double>>>> action_map;
    // memory_update[node][obs][k] = (action, list of (node, prob))
    std::vector<std::vector<std::vector<std::pair<int, std::vector<std::pair<int, double>>>>>>
        memory_update;
};

/// Expected discounted cost-to-target per state; zero on target states.
struct CostVector {
    std::vector<double> values;

    double at(int s) const { return values[s]; }
};

}  // namespace decgame
