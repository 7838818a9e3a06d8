#include "decgame/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "decgame/validate.hpp"

namespace decgame {

namespace {
constexpr double kRowTol = 1e-9;
}

const std::vector<std::pair<int, double>>& infiltrator_row(const OneSidedPosg& posg,
                                                           const InfiltratorStrategy& s, int state) {
    int z = posg.obs_of[state];
    if (!s.has_row(z))
        throw StrategyError("incomplete strategy: no row for observation '" +
                            (z >= 0 ? posg.observation_names[z] : std::string("?")) +
                            "' required at state '" + posg.game.state_names[state] + "'");
    const auto& row = s.rows[z];
    double sum = 0.0;
    for (const auto& [a, p] : row) {
        if (p < -kRowTol) throw StrategyError("negative probability in strategy row");
        if (p > 0.0 && posg.game.find_row(state, a) == nullptr)
            throw StrategyError("strategy puts probability on action '" +
                                posg.game.action_names[a] + "' disabled at state '" +
                                posg.game.state_names[state] + "'");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kRowTol)
        throw StrategyError("strategy row for observation '" + posg.observation_names[z] +
                            "' sums to " + std::to_string(sum));
    return row;
}

InducedChain induced_chain(const OneSidedPosg& posg, const DeceiverStrategy& d,
                           const InfiltratorStrategy& s) {
    const StochasticGame& g = posg.game;
    const int n = g.num_states();
    InducedChain chain;
    chain.num_states = n;
    chain.initial = g.initial;
    chain.discount = g.discount;
    chain.player = g.player;
    chain.is_target.assign(posg.is_target.begin(), posg.is_target.end());
    chain.cost.assign(n, 0.0);
    chain.succ.assign(n, {});

    // Reachable states must have strategy entries; unreachable ones without
    // entries are kept absorbing with zero cost so the fixed point stays
    // finite and the value at the initial state is unaffected.
    std::vector<char> reachable(n, 0);
    std::deque<int> queue;
    reachable[g.initial] = 1;
    queue.push_back(g.initial);

    auto resolve = [&](int u, bool must) -> bool {
        if (posg.is_target[u]) {
            chain.succ[u] = {{u, 1.0}};
            chain.cost[u] = 0.0;
            return true;
        }
        if (g.is_deceiver(u)) {
            if (!d.has_choice(u)) {
                if (must)
                    throw StrategyError("incomplete strategy: deceiver has no choice at reachable state '" +
                                        g.state_names[u] + "'");
                chain.succ[u] = {{u, 1.0}};
                return false;
            }
            const ActionRow* row = g.find_row(u, d.choice[u]);
            if (row == nullptr)
                throw StrategyError("deceiver strategy picks disabled action at state '" +
                                    g.state_names[u] + "'");
            chain.cost[u] = row->cost;
            for (const auto& [succ, p] : row->successors)
                chain.succ[u].emplace_back(succ, to_double(p));
            return true;
        }
        int z = posg.obs_of[u];
        if (!s.has_row(z)) {
            if (must)
                throw StrategyError("incomplete strategy: no infiltrator row for reachable state '" +
                                    g.state_names[u] + "'");
            chain.succ[u] = {{u, 1.0}};
            return false;
        }
        const auto& srow = infiltrator_row(posg, s, u);
        double cost = 0.0;
        std::vector<double> dense(n, 0.0);
        for (const auto& [a, p] : srow) {
            if (p == 0.0) continue;
            const ActionRow* row = g.find_row(u, a);
            cost += p * row->cost;
            for (const auto& [succ, q] : row->successors) dense[succ] += p * to_double(q);
        }
        chain.cost[u] = cost;
        for (int v = 0; v < n; ++v)
            if (dense[v] != 0.0) chain.succ[u].emplace_back(v, dense[v]);
        return true;
    };

    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        resolve(u, /*must=*/true);
        for (const auto& [v, p] : chain.succ[u]) {
            (void)p;
            if (!reachable[v]) {
                reachable[v] = 1;
                queue.push_back(v);
            }
        }
    }
    for (int u = 0; u < n; ++u)
        if (!reachable[u]) resolve(u, /*must=*/false);
    return chain;
}

CostVector chain_cost(const InducedChain& chain) {
    const int n = chain.num_states;
    const double gamma = chain.discount;
    std::vector<double> c(n, 0.0);
    double residual = std::numeric_limits<double>::infinity();
    for (long sweep = 0; sweep < detail::kFixedPointMaxSweeps; ++sweep) {
        residual = 0.0;
        // Infiltrator states first (no discount), then deceiver states using
        // the fresh infiltrator values; each full sweep contracts by gamma.
        for (int s = 0; s < n; ++s) {
            if (chain.is_target[s] || chain.player[s] != Player::Infiltrator) continue;
            double v = chain.cost[s];
            for (const auto& [succ, p] : chain.succ[s]) v += p * c[succ];
            residual = std::max(residual, std::abs(v - c[s]));
            c[s] = v;
        }
        for (int s = 0; s < n; ++s) {
            if (chain.is_target[s] || chain.player[s] != Player::Deceiver) continue;
            double v = chain.cost[s];
            for (const auto& [succ, p] : chain.succ[s]) v += gamma * p * c[succ];
            residual = std::max(residual, std::abs(v - c[s]));
            c[s] = v;
        }
        if (residual <= detail::kFixedPointResidual) return CostVector{std::move(c)};
    }
    throw InternalError("fixed point not reached after iteration cap; residual " +
                        std::to_string(residual));
}

CostVector evaluate_cost(const OneSidedPosg& posg, const DeceiverStrategy& d,
                         const InfiltratorStrategy& s) {
    return chain_cost(induced_chain(posg, d, s));
}

CostVector evaluate_cost_mdp(const OneSidedPosg& mdp, const DeceiverStrategy& d) {
    InfiltratorStrategy forced;
    forced.rows.assign(mdp.num_observations(), {});
    for (int s = 0; s < mdp.game.num_states(); ++s) {
        if (mdp.game.is_deceiver(s)) continue;
        int z = mdp.obs_of[s];
        if (z < 0) continue;
        if (forced.rows[z].empty()) {
            if (mdp.game.rows[s].size() != 1)
                throw DomainError("evaluate_cost_mdp expects single-action infiltrator states; state '" +
                                  mdp.game.state_names[s] + "' has " +
                                  std::to_string(mdp.game.rows[s].size()));
            forced.rows[z] = {{mdp.game.rows[s][0].action, 1.0}};
        }
    }
    return evaluate_cost(mdp, d, forced);
}

namespace {

/// Shared value-iteration core for (possibly pinned) deceiver minimization.
std::pair<DeceiverStrategy, CostVector> min_value_iteration(const OneSidedPosg& posg,
                                                            const InfiltratorStrategy& s,
                                                            const DeceiverStrategy* pinned) {
    const StochasticGame& g = posg.game;
    const int n = g.num_states();
    const double gamma = g.discount;

    // Pre-resolve infiltrator rows (mixture cost and transition row).
    std::vector<double> inf_cost(n, 0.0);
    std::vector<std::vector<std::pair<int, double>>> inf_succ(n);
    for (int u = 0; u < n; ++u) {
        if (g.is_deceiver(u) || posg.is_target[u]) continue;
        const auto& srow = infiltrator_row(posg, s, u);
        std::vector<double> dense(n, 0.0);
        for (const auto& [a, p] : srow) {
            if (p == 0.0) continue;
            const ActionRow* row = g.find_row(u, a);
            inf_cost[u] += p * row->cost;
            for (const auto& [succ, q] : row->successors) dense[succ] += p * to_double(q);
        }
        for (int v = 0; v < n; ++v)
            if (dense[v] != 0.0) inf_succ[u].emplace_back(v, dense[v]);
    }

    auto q_value = [&](const ActionRow& row, const std::vector<double>& c) {
        double v = row.cost;
        for (const auto& [succ, p] : row.successors) v += gamma * to_double(p) * c[succ];
        return v;
    };

    std::vector<double> c(n, 0.0);
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (long sweep = 0; sweep < detail::kFixedPointMaxSweeps && !converged; ++sweep) {
        residual = 0.0;
        for (int u = 0; u < n; ++u) {
            if (posg.is_target[u] || g.is_deceiver(u)) continue;
            double v = inf_cost[u];
            for (const auto& [succ, p] : inf_succ[u]) v += p * c[succ];
            residual = std::max(residual, std::abs(v - c[u]));
            c[u] = v;
        }
        for (int u = 0; u < n; ++u) {
            if (posg.is_target[u] || !g.is_deceiver(u)) continue;
            double v;
            if (pinned != nullptr && pinned->has_choice(u)) {
                const ActionRow* row = g.find_row(u, pinned->choice[u]);
                if (row == nullptr)
                    throw StrategyError("pinned action disabled at state '" + g.state_names[u] + "'");
                v = q_value(*row, c);
            } else {
                v = std::numeric_limits<double>::infinity();
                for (const auto& row : g.rows[u]) v = std::min(v, q_value(row, c));
            }
            residual = std::max(residual, std::abs(v - c[u]));
            c[u] = v;
        }
        converged = residual <= detail::kFixedPointResidual;
    }
    if (!converged)
        throw InternalError("fixed point not reached after iteration cap; residual " +
                            std::to_string(residual));

    DeceiverStrategy strat;
    strat.choice.assign(n, -1);
    for (int u = 0; u < n; ++u) {
        if (!g.is_deceiver(u)) continue;
        if (pinned != nullptr && pinned->has_choice(u)) {
            strat.choice[u] = pinned->choice[u];
            continue;
        }
        // Smallest action index among minimizers; rows are action-sorted.
        double best = std::numeric_limits<double>::infinity();
        int best_a = -1;
        for (const auto& row : g.rows[u]) {
            double v = q_value(row, c);
            if (v < best) {
                best = v;
                best_a = row.action;
            }
        }
        strat.choice[u] = best_a;
    }
    return {std::move(strat), CostVector{std::move(c)}};
}

}  // namespace

std::pair<DeceiverStrategy, CostVector> best_response_deceiver(const OneSidedPosg& posg,
                                                               const InfiltratorStrategy& s) {
    return min_value_iteration(posg, s, nullptr);
}

std::pair<DeceiverStrategy, CostVector> best_response_pinned(const OneSidedPosg& posg,
                                                             const InfiltratorStrategy& s,
                                                             const DeceiverStrategy& pinned) {
    return min_value_iteration(posg, s, &pinned);
}

std::pair<double, int> worst_case_value(const OneSidedPosg& posg, const DeceiverStrategy& d,
                                        const std::vector<InfiltratorStrategy>& strategies) {
    if (strategies.empty()) throw DomainError("no strategies: worst_case_value needs a nonempty list");
    double best = -std::numeric_limits<double>::infinity();
    int best_i = -1;
    for (std::size_t i = 0; i < strategies.size(); ++i) {
        double v = evaluate_cost(posg, d, strategies[i]).at(posg.game.initial);
        if (v > best) {
            best = v;
            best_i = static_cast<int>(i);
        }
    }
    return {best, best_i};
}

}  // namespace decgame
