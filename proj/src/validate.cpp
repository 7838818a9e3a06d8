#include "decgame/validate.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace decgame {

namespace {
constexpr double kProbTol = 1e-9;
}

std::vector<Violation> validate(const OneSidedPosg& posg) {
    std::vector<Violation> out;
    const StochasticGame& g = posg.game;
    const int n = g.num_states();

    auto add = [&out](std::string code, std::string message) {
        out.push_back({std::move(code), std::move(message)});
    };

    if (n == 0) {
        add("empty-model", "model has no states");
        return out;
    }
    if (g.initial < 0 || g.initial >= n) add("bad-initial", "initial state id out of range");
    if (!(g.discount >= 0.0) || g.discount >= 1.0)
        add("bad-discount", "discount must satisfy 0 <= gamma < 1, got " + std::to_string(g.discount));

    if (static_cast<int>(g.player.size()) != n || static_cast<int>(g.rows.size()) != n ||
        static_cast<int>(posg.obs_of.size()) != n || static_cast<int>(posg.is_target.size()) != n) {
        add("inconsistent-arrays", "per-state arrays have mismatched lengths");
        return out;
    }

    for (int s = 0; s < n; ++s) {
        const std::string& sn = g.state_names[s];
        if (g.rows[s].empty()) add("deadlock", "state '" + sn + "' has no enabled action");
        std::set<int> seen_actions;
        for (const auto& row : g.rows[s]) {
            if (row.action < 0 || row.action >= g.num_actions()) {
                add("bad-action", "state '" + sn + "' uses an action id out of range");
                continue;
            }
            const std::string& an = g.action_names[row.action];
            if (!seen_actions.insert(row.action).second)
                add("duplicate-action", "state '" + sn + "' lists action '" + an + "' twice");
            if (row.successors.empty()) {
                add("empty-distribution", "state '" + sn + "' action '" + an + "' has no successors");
                continue;
            }
            Rational sum = 0;
            for (const auto& [succ, p] : row.successors) {
                if (succ < 0 || succ >= n) {
                    add("bad-successor", "state '" + sn + "' action '" + an + "' has a successor id out of range");
                    continue;
                }
                double pd = to_double(p);
                if (pd < -kProbTol || pd > 1.0 + kProbTol)
                    add("probability-out-of-range",
                        "P('" + sn + "', '" + an + "', '" + g.state_names[succ] + "') = " +
                            std::to_string(pd));
                if (g.player[succ] == g.player[s])
                    add("bipartite-alternation",
                        "edge '" + sn + "' -> '" + g.state_names[succ] +
                            "' stays on the same side (action '" + an + "')");
                sum += p;
            }
            if (std::abs(to_double(sum) - 1.0) > kProbTol)
                add("distribution-not-normalized",
                    "P('" + sn + "', '" + an + "', .) sums to " + std::to_string(to_double(sum)));
        }
        if (g.player[s] == Player::Infiltrator) {
            int z = posg.obs_of[s];
            if (z < 0 || z >= posg.num_observations())
                add("missing-observation", "infiltrator state '" + sn + "' has no observation");
        }
    }

    // States with equal observation must offer identical action sets.
    std::map<int, std::pair<int, std::vector<int>>> rep;  // obs -> (state, actions)
    for (int s = 0; s < n; ++s) {
        if (g.player[s] != Player::Infiltrator) continue;
        int z = posg.obs_of[s];
        if (z < 0 || z >= posg.num_observations()) continue;
        auto acts = g.enabled_actions(s);
        auto [it, inserted] = rep.emplace(z, std::make_pair(s, acts));
        if (!inserted && it->second.second != acts)
            add("observation-action-mismatch",
                "states '" + g.state_names[it->second.first] + "' and '" + g.state_names[s] +
                    "' share observation '" + posg.observation_names[z] +
                    "' but enable different action sets");
    }

    return out;
}

void require_valid(const OneSidedPosg& posg) {
    auto report = validate(posg);
    if (!report.empty()) throw ModelError("invalid model:\n" + format_violations(report));
}

std::string format_violations(const std::vector<Violation>& violations) {
    std::ostringstream os;
    for (const auto& v : violations) os << "  [" << v.code << "] " << v.message << "\n";
    return os.str();
}

}  // namespace decgame
