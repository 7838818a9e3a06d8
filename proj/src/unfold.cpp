#include "decgame/unfold.hpp"

#include <algorithm>
#include <map>

#include "decgame/validate.hpp"

namespace decgame {

int UnfoldedPosg::unfolded_state(int s, int node) const {
    int n = static_cast<int>(orig_state.size()) / k;
    return node * n + s;
}

UnfoldedPosg unfold_memory(const OneSidedPosg& posg, int k) {
    if (k < 1) throw DomainError("unfold_memory: k must be >= 1, got " + std::to_string(k));
    require_valid(posg);
    const StochasticGame& g = posg.game;
    const int n = g.num_states();
    const int num_acts = g.num_actions();
    const int num_obs = posg.num_observations();

    UnfoldedPosg out;
    out.k = k;
    StochasticGame& ug = out.posg.game;
    ug.discount = g.discount;

    auto suffix = [k](int node) { return k == 1 ? std::string() : "@m" + std::to_string(node + 1); };

    // States: node-major blocks of the original state set.
    for (int node = 0; node < k; ++node) {
        for (int s = 0; s < n; ++s) {
            ug.state_names.push_back(g.state_names[s] + suffix(node));
            ug.player.push_back(g.player[s]);
            out.orig_state.push_back(s);
            out.state_node.push_back(node);
            out.posg.is_target.push_back(posg.is_target[s]);
        }
    }
    ug.initial = g.initial;  // node 0 copy

    // Actions: originals (used by deceiver states), then one copy of every
    // original action per target node for the infiltrator.
    for (int a = 0; a < num_acts; ++a) {
        ug.action_names.push_back(g.action_names[a]);
        out.orig_action.push_back(a);
        out.action_node.push_back(-1);
    }
    // paired_action[a][node] = unfolded action id for (a, node)
    std::vector<std::vector<int>> paired_action(num_acts, std::vector<int>(k, -1));
    if (k == 1) {
        for (int a = 0; a < num_acts; ++a) paired_action[a][0] = a;
    } else {
        for (int node = 0; node < k; ++node) {
            for (int a = 0; a < num_acts; ++a) {
                paired_action[a][node] = static_cast<int>(ug.action_names.size());
                ug.action_names.push_back(g.action_names[a] + suffix(node));
                out.orig_action.push_back(a);
                out.action_node.push_back(node);
            }
        }
    }

    for (int node = 0; node < k; ++node) {
        for (int z = 0; z < num_obs; ++z) {
            out.posg.observation_names.push_back(posg.observation_names[z] + suffix(node));
            out.orig_observation.push_back(z);
            out.observation_node.push_back(node);
        }
    }

    ug.rows.assign(n * k, {});
    out.posg.obs_of.assign(n * k, -1);
    for (int node = 0; node < k; ++node) {
        for (int s = 0; s < n; ++s) {
            int us = node * n + s;
            if (g.is_deceiver(s)) {
                // Deceiver moves keep the current memory node.
                for (const auto& row : g.rows[s]) {
                    ActionRow r;
                    r.action = row.action;
                    r.cost = row.cost;
                    for (const auto& [succ, p] : row.successors)
                        r.successors.emplace_back(node * n + succ, p);
                    ug.rows[us].push_back(std::move(r));
                }
                continue;
            }
            out.posg.obs_of[us] = node * num_obs + posg.obs_of[s];
            // Infiltrator actions fan out over target nodes; switching is free.
            for (int target = 0; target < k; ++target) {
                for (const auto& row : g.rows[s]) {
                    ActionRow r;
                    r.action = paired_action[row.action][target];
                    r.cost = row.cost;
                    for (const auto& [succ, p] : row.successors)
                        r.successors.emplace_back(target * n + succ, p);
                    ug.rows[us].push_back(std::move(r));
                }
            }
            std::sort(ug.rows[us].begin(), ug.rows[us].end(),
                      [](const ActionRow& a, const ActionRow& b) { return a.action < b.action; });
        }
    }
    return out;
}

FiniteStateController fsc_from_unfolded(const UnfoldedPosg& unfolded,
                                        const InfiltratorStrategy& strategy) {
    const int k = unfolded.k;
    const OneSidedPosg& up = unfolded.posg;
    int num_orig_obs = 0;
    for (int z : unfolded.orig_observation) num_orig_obs = std::max(num_orig_obs, z + 1);
    int num_orig_actions = 0;
    for (int a : unfolded.orig_action) num_orig_actions = std::max(num_orig_actions, a + 1);

    FiniteStateController fsc;
    fsc.num_nodes = k;
    fsc.initial_node = 0;
    fsc.action_map.assign(k, std::vector<std::vector<std::pair<int, double>>>(num_orig_obs));
    fsc.memory_update.assign(
        k, std::vector<std::vector<std::pair<int, std::vector<std::pair<int, double>>>>>(num_orig_obs));

    for (int uz = 0; uz < up.num_observations(); ++uz) {
        if (!strategy.has_row(uz))
            throw StrategyError("incomplete strategy: no row for unfolded observation '" +
                                up.observation_names[uz] + "'");
        int z = unfolded.orig_observation[uz];
        int node = unfolded.observation_node[uz];
        // joint[(a)][target] = strategy((z,node), (a,target))
        std::map<int, std::vector<double>> joint;
        for (const auto& [ua, p] : strategy.rows[uz]) {
            int a = unfolded.orig_action[ua];
            int target = unfolded.action_node[ua];
            if (target < 0) target = node;  // k == 1: actions are not node-tagged
            auto& slots = joint.try_emplace(a, std::vector<double>(k, 0.0)).first->second;
            slots[target] += p;
        }
        auto& amap = fsc.action_map[node][z];
        auto& mupd = fsc.memory_update[node][z];
        for (int a = 0; a < num_orig_actions; ++a) {
            auto it = joint.find(a);
            if (it == joint.end()) continue;
            double marginal = 0.0;
            for (double v : it->second) marginal += v;
            amap.emplace_back(a, marginal);
            std::vector<std::pair<int, double>> update;
            if (marginal > 0.0) {
                for (int target = 0; target < k; ++target)
                    if (it->second[target] != 0.0) update.emplace_back(target, it->second[target] / marginal);
            } else {
                update.emplace_back(node, 1.0);  // unreachable branch: stay put
            }
            mupd.emplace_back(a, std::move(update));
        }
    }
    return fsc;
}

DeceiverStrategy lift_deceiver_strategy(const UnfoldedPosg& unfolded, const DeceiverStrategy& d) {
    DeceiverStrategy out;
    out.choice.assign(unfolded.posg.game.num_states(), -1);
    for (int us = 0; us < unfolded.posg.game.num_states(); ++us) {
        if (unfolded.posg.game.player[us] != Player::Deceiver) continue;
        int s = unfolded.orig_state[us];
        if (d.has_choice(s)) out.choice[us] = d.choice[s];
    }
    return out;
}

}  // namespace decgame
