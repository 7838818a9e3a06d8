#include "decgame/bnb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "decgame/evaluate.hpp"
#include "decgame/validate.hpp"

namespace decgame {

namespace {
constexpr double kPruneSlack = 1e-9;

/// Deceiver strategy skeleton: forced single-action and target states filled
/// with their smallest enabled action, branching states left open.
DeceiverStrategy base_strategy(const OneSidedPosg& posg, const std::vector<int>& branch_states) {
    DeceiverStrategy d;
    d.choice.assign(posg.game.num_states(), -1);
    std::vector<char> branching(posg.game.num_states(), 0);
    for (int s : branch_states) branching[s] = 1;
    for (int s = 0; s < posg.game.num_states(); ++s) {
        if (!posg.game.is_deceiver(s) || branching[s]) continue;
        d.choice[s] = posg.game.rows[s].front().action;
    }
    return d;
}

std::vector<int> branch_order(const OneSidedPosg& posg) {
    std::vector<int> states;
    for (int s = 0; s < posg.game.num_states(); ++s)
        if (posg.game.is_deceiver(s) && !posg.is_target[s] && posg.game.rows[s].size() > 1)
            states.push_back(s);
    std::stable_sort(states.begin(), states.end(), [&posg](int a, int b) {
        auto da = posg.game.rows[a].size();
        auto db = posg.game.rows[b].size();
        if (da != db) return da > db;
        return a < b;
    });
    return states;
}

}  // namespace

BnbResult solve_milp_bnb(const OneSidedPosg& posg,
                         const std::vector<InfiltratorStrategy>& strategies,
                         const MilpProblem& problem, const BnbObserver& observer) {
    require_valid(posg);
    if (strategies.empty()) throw DomainError("no strategies: solve_milp_bnb needs a nonempty list");
    if (problem.num_strategies != static_cast<int>(strategies.size()))
        throw DomainError("problem was built for a different strategy count");

    const std::vector<int> branch_states = branch_order(posg);
    const int depth_max = static_cast<int>(branch_states.size());

    BnbResult result;
    result.value = std::numeric_limits<double>::infinity();
    double min_pruned_bound = std::numeric_limits<double>::infinity();

    DeceiverStrategy pinned = base_strategy(posg, branch_states);

    // Lower bound: per strategy, the minimizing DP with the current prefix
    // pinned; free states relax the coupling, so max_i of these is sound.
    // Also returns the attaining strategy's full DP policy for the greedy
    // completion.
    auto node_bound = [&](DeceiverStrategy& pin) {
        double lb = -std::numeric_limits<double>::infinity();
        DeceiverStrategy greedy;
        int attaining = -1;
        for (std::size_t i = 0; i < strategies.size(); ++i) {
            auto [policy, cost] = best_response_pinned(posg, strategies[i], pin);
            double v = cost.at(posg.game.initial);
            if (v > lb) {
                lb = v;
                greedy = std::move(policy);
                attaining = static_cast<int>(i);
            }
        }
        return std::make_tuple(lb, std::move(greedy), attaining);
    };

    auto try_incumbent = [&](const DeceiverStrategy& d) {
        auto [v, idx] = worst_case_value(posg, d, strategies);
        if (v < result.value) {
            result.value = v;
            result.strategy = d;
            result.attaining_index = idx;
        }
    };

    // Depth-first over the branch states; explicit stack of (depth, action
    // position) would obscure the pruning logic, recursion depth is small.
    std::function<void(int)> visit = [&](int depth) {
        ++result.nodes_explored;
        auto [lb, greedy, attaining] = node_bound(pinned);
        (void)attaining;
        bool prune = lb >= result.value - kPruneSlack;
        if (observer) observer(depth, lb, prune && depth > 0);
        if (depth == depth_max) {
            try_incumbent(greedy);  // fully pinned: greedy == pinned completion
            return;
        }
        if (prune && depth > 0 && result.value < std::numeric_limits<double>::infinity()) {
            min_pruned_bound = std::min(min_pruned_bound, lb);
            return;
        }
        try_incumbent(greedy);
        int s = branch_states[depth];
        for (const auto& row : posg.game.rows[s]) {
            pinned.choice[s] = row.action;
            visit(depth + 1);
        }
        pinned.choice[s] = -1;
    };
    visit(0);

    result.proof_gap =
        std::isfinite(min_pruned_bound) ? std::max(0.0, result.value - min_pruned_bound) : 0.0;
    return result;
}

std::pair<DeceiverStrategy, double> brute_force_robust(
    const OneSidedPosg& posg, const std::vector<InfiltratorStrategy>& strategies) {
    require_valid(posg);
    if (strategies.empty()) throw DomainError("no strategies: brute_force_robust needs a nonempty list");

    std::vector<int> free_states;
    long double product = 1.0L;
    for (int s = 0; s < posg.game.num_states(); ++s) {
        if (!posg.game.is_deceiver(s) || posg.is_target[s]) continue;
        free_states.push_back(s);
        product *= static_cast<long double>(posg.game.rows[s].size());
        if (product > 1e6L)
            throw DomainError("enumeration guard exceeded: strategy space larger than 1e6");
    }

    DeceiverStrategy d = base_strategy(posg, {});
    // Odometer over action positions, most significant digit first so the
    // scan order is lexicographic in (delta(sـ0), delta(s_1), ...).
    std::vector<std::size_t> pos(free_states.size(), 0);
    for (std::size_t i = 0; i < free_states.size(); ++i)
        d.choice[free_states[i]] = posg.game.rows[free_states[i]][0].action;

    DeceiverStrategy best = d;
    double best_value = std::numeric_limits<double>::infinity();
    while (true) {
        double v = worst_case_value(posg, d, strategies).first;
        if (v < best_value) {
            best_value = v;
            best = d;
        }
        // advance odometer (last state fastest, so earlier states dominate
        // the lexicographic order)
        bool advanced = false;
        std::size_t i = free_states.size();
        while (i > 0) {
            --i;
            if (++pos[i] < posg.game.rows[free_states[i]].size()) {
                d.choice[free_states[i]] = posg.game.rows[free_states[i]][pos[i]].action;
                advanced = true;
                break;
            }
            pos[i] = 0;
            d.choice[free_states[i]] = posg.game.rows[free_states[i]][0].action;
        }
        if (!advanced) break;
    }
    return {best, best_value};
}

}  // namespace decgame
