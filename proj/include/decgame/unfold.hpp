#pragma once

#include <vector>

#include "decgame/model.hpp"

namespace decgame {

/// k-memory unfolding of a POSG together with the bookkeeping needed to map
/// unfolded ids back to the source game. States are (original state, memory
/// node); infiltrator actions become (original action, target node) pairs so
/// a memoryless strategy on the unfolding realizes a k-node controller.
struct UnfoldedPosg {
    OneSidedPosg posg;
    int k = 1;

    std::vector<int> orig_state;        // per unfolded state
    std::vector<int> state_node;        // per unfolded state, 0-based
    std::vector<int> orig_action;       // per unfolded action
    std::vector<int> action_node;       // per unfolded action; -1 for deceiver actions
    std::vector<int> orig_observation;  // per unfolded observation
    std::vector<int> observation_node;  // per unfolded observation

    int unfolded_state(int s, int node) const;
};

/// Creates k copies of the game. The infiltrator switches copies freely as
/// part of its actions (switching is free and unobserved by costs); deceiver
/// moves preserve the current node; observations become (observation, node)
/// so the memory is transparent. k = 1 yields an isomorphic model.
UnfoldedPosg unfold_memory(const OneSidedPosg& posg, int k);

/// Folds a memoryless strategy on the unfolding into an explicit k-node
/// controller: action_map marginalizes over target nodes, memory_update is
/// the conditional over target nodes (Dirac self-loop on zero marginals).
FiniteStateController fsc_from_unfolded(const UnfoldedPosg& unfolded,
                                        const InfiltratorStrategy& strategy);

/// Lifts a deceiver strategy of the source game to the unfolding (same
/// action in every copy).
DeceiverStrategy lift_deceiver_strategy(const UnfoldedPosg& unfolded, const DeceiverStrategy& d);

}  // namespace decgame
