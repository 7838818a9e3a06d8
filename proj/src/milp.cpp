#include "decgame/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "decgame/evaluate.hpp"
#include "decgame/validate.hpp"

namespace decgame {

namespace {

std::string num17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// "+ 2.5 x" / "- 2.5 x" term with LP-format spacing.
void append_term(std::ostream& os, bool first, double coeff, const std::string& var) {
    double a = coeff;
    if (first) {
        if (a < 0) {
            os << "- ";
            a = -a;
        }
    } else {
        os << (a < 0 ? " - " : " + ");
        if (a < 0) a = -a;
    }
    os << num17(a) << " " << var;
}

}  // namespace

int MilpProblem::binary_index(int state, int action) const {
    for (std::size_t i = 0; i < binaries.size(); ++i)
        if (binaries[i].state == state && binaries[i].action == action) return static_cast<int>(i);
    return -1;
}

double compute_big_m(const OneSidedPosg& posg) {
    require_valid(posg);
    double cmax = 0.0;
    for (int s = 0; s < posg.game.num_states(); ++s)
        for (const auto& row : posg.game.rows[s]) cmax = std::max(cmax, std::abs(row.cost));
    return 2.0 * cmax / (1.0 - posg.game.discount) + 1.0;
}

MilpProblem build_milp(const OneSidedPosg& posg, const std::vector<InfiltratorStrategy>& strategies,
                       double big_m) {
    require_valid(posg);
    if (strategies.empty()) throw DomainError("no strategies: build_milp needs a nonempty list");
    const StochasticGame& g = posg.game;
    const int n = g.num_states();
    const int num_strats = static_cast<int>(strategies.size());

    int k0 = strategies.front().memory_nodes;
    for (const auto& s : strategies)
        if (s.memory_nodes != k0)
            throw DomainError("mixed memory sizes in one strategy set; solve per k and combine");

    MilpProblem p;
    p.num_strategies = num_strats;
    p.num_states = n;
    p.initial = g.initial;
    p.discount = g.discount;
    p.big_m = big_m;

    for (int s = 0; s < n; ++s) {
        if (!g.is_deceiver(s)) continue;
        MilpProblem::OneHotRow row;
        row.state = s;
        for (const auto& ar : g.rows[s]) {
            row.binary_ids.push_back(static_cast<int>(p.binaries.size()));
            p.binaries.push_back({s, ar.action});
        }
        p.onehot_rows.push_back(std::move(row));
    }

    for (int s = 0; s < n; ++s)
        if (posg.is_target[s]) p.boundary_states.push_back(s);

    for (int i = 0; i < num_strats; ++i) {
        const InfiltratorStrategy& sigma = strategies[i];
        for (int s = 0; s < n; ++s) {
            if (posg.is_target[s]) continue;
            if (g.is_deceiver(s)) {
                for (const auto& ar : g.rows[s]) {
                    MilpProblem::BigMPair pair;
                    pair.strategy = i;
                    pair.state = s;
                    pair.action = ar.action;
                    pair.binary_id = p.binary_index(s, ar.action);
                    pair.cost = ar.cost;
                    for (const auto& [succ, prob] : ar.successors)
                        pair.successor_probs.emplace_back(succ, to_double(prob));
                    p.bigm_pairs.push_back(std::move(pair));
                }
                continue;
            }
            int z = posg.obs_of[s];
            if (!sigma.has_row(z))
                throw StrategyError("strategy " + std::to_string(i) +
                                    " has no row for observation '" +
                                    posg.observation_names[z] + "'");
            const auto& srow = infiltrator_row(posg, sigma, s);
            MilpProblem::InfiltratorRow row;
            row.strategy = i;
            row.state = s;
            row.rhs = 0.0;
            std::vector<double> dense(n, 0.0);
            for (const auto& [a, prob] : srow) {
                if (prob == 0.0) continue;
                const ActionRow* ar = g.find_row(s, a);
                row.rhs += prob * ar->cost;
                for (const auto& [succ, q] : ar->successors) dense[succ] += prob * to_double(q);
            }
            for (int v = 0; v < n; ++v)
                if (dense[v] != 0.0) row.successor_coeffs.emplace_back(v, dense[v]);
            p.eq17_rows.push_back(std::move(row));
        }
    }
    return p;
}

std::string export_milp(const MilpProblem& p) {
    if (p.num_strategies == 0) throw DomainError("refusing to export an empty program");
    std::ostringstream os;
    auto cvar = [](int i, int s) { return "c_" + std::to_string(i) + "_" + std::to_string(s); };
    auto dvar = [&p](int b) {
        return "d_" + std::to_string(p.binaries[b].state) + "_" + std::to_string(p.binaries[b].action);
    };

    os << "\\ robust deception MILP (N=" << p.num_strategies << ", M=" << num17(p.big_m)
       << ", gamma=" << num17(p.discount) << ")\n";
    os << "Minimize\n obj: t\n";
    os << "Subject To\n";
    for (int i = 0; i < p.num_strategies; ++i)
        os << " tmax_" << i << ": t - " << num17(1.0) << " " << cvar(i, p.initial) << " >= 0\n";
    for (const auto& row : p.onehot_rows) {
        os << " onehot_" << row.state << ": ";
        bool first = true;
        for (int b : row.binary_ids) {
            append_term(os, first, 1.0, dvar(b));
            first = false;
        }
        os << " = 1\n";
    }
    for (const auto& row : p.eq17_rows) {
        os << " eq17_" << row.strategy << "_" << row.state << ": ";
        append_term(os, true, 1.0, cvar(row.strategy, row.state));
        for (const auto& [succ, coeff] : row.successor_coeffs)
            append_term(os, false, -coeff, cvar(row.strategy, succ));
        os << " = " << num17(row.rhs) << "\n";
    }
    for (const auto& pair : p.bigm_pairs) {
        // c - gamma*sum(P c) - M d >= C - M
        os << " m18_" << pair.strategy << "_" << pair.state << "_" << pair.action << ": ";
        append_term(os, true, 1.0, cvar(pair.strategy, pair.state));
        for (const auto& [succ, prob] : pair.successor_probs)
            append_term(os, false, -p.discount * prob, cvar(pair.strategy, succ));
        append_term(os, false, -p.big_m, dvar(pair.binary_id));
        os << " >= " << num17(pair.cost - p.big_m) << "\n";
        // c - gamma*sum(P c) + M d <= C + M
        os << " m19_" << pair.strategy << "_" << pair.state << "_" << pair.action << ": ";
        append_term(os, true, 1.0, cvar(pair.strategy, pair.state));
        for (const auto& [succ, prob] : pair.successor_probs)
            append_term(os, false, -p.discount * prob, cvar(pair.strategy, succ));
        append_term(os, false, p.big_m, dvar(pair.binary_id));
        os << " <= " << num17(pair.cost + p.big_m) << "\n";
    }
    for (int i = 0; i < p.num_strategies; ++i)
        for (int s : p.boundary_states)
            os << " eq15_" << i << "_" << s << ": " << num17(1.0) << " " << cvar(i, s) << " = 0\n";
    os << "Bounds\n";
    os << " -" << num17(p.big_m) << " <= t <= " << num17(p.big_m) << "\n";
    for (int i = 0; i < p.num_strategies; ++i)
        for (int s = 0; s < p.num_states; ++s)
            os << " -" << num17(p.big_m) << " <= " << cvar(i, s) << " <= " << num17(p.big_m) << "\n";
    os << "Binaries\n";
    for (std::size_t b = 0; b < p.binaries.size(); ++b) os << " " << dvar(static_cast<int>(b)) << "\n";
    os << "End\n";
    return os.str();
}

std::string build_robust_milp_export(const OneSidedPosg& posg) {
    require_valid(posg);
    const StochasticGame& g = posg.game;
    const int n = g.num_states();
    double big_m = compute_big_m(posg);

    std::ostringstream os;
    os << "\\ robust deception program over a symbolic infiltrator strategy\n";
    os << "\\ sigma_<z>_<a> symbols are the adversary's ObAct probabilities; rows marked\n";
    os << "\\ [uncertain] contain sigma*cost products and are not solver-consumable.\n";
    os << "\\ M=" << num17(big_m) << ", gamma=" << num17(g.discount) << "\n";
    os << "Minimize\n obj: c_" << g.initial << "\n";
    os << "Subject To\n";
    for (int s = 0; s < n; ++s)
        if (posg.is_target[s]) os << " eq2_" << s << ": c_" << s << " = 0\n";
    // One strategy-normalization row per observation.
    std::vector<std::vector<int>> obs_actions(posg.num_observations());
    for (int s = 0; s < n; ++s) {
        if (g.is_deceiver(s)) continue;
        int z = posg.obs_of[s];
        if (obs_actions[z].empty()) obs_actions[z] = g.enabled_actions(s);
    }
    for (int z = 0; z < posg.num_observations(); ++z) {
        if (obs_actions[z].empty()) continue;
        os << " eq3_" << z << ":";
        bool first = true;
        for (int a : obs_actions[z]) {
            os << (first ? " " : " + ") << "sigma_" << z << "_" << a;
            first = false;
        }
        os << " = 1\n";
    }
    for (int s = 0; s < n; ++s) {
        if (!g.is_deceiver(s)) continue;
        os << " eq4_" << s << ":";
        bool first = true;
        for (const auto& row : g.rows[s]) {
            os << (first ? " " : " + ") << "d_" << s << "_" << row.action;
            first = false;
        }
        os << " = 1\n";
    }
    for (int s = 0; s < n; ++s) {
        if (g.is_deceiver(s) || posg.is_target[s]) continue;
        int z = posg.obs_of[s];
        os << " eq5_" << s << " [uncertain]: c_" << s << " =";
        bool first = true;
        for (const auto& row : g.rows[s]) {
            os << (first ? " " : " + ") << "sigma_" << z << "_" << row.action << " * ("
               << num17(row.cost);
            for (const auto& [succ, prob] : row.successors)
                os << " + " << num17(to_double(prob)) << " c_" << succ;
            os << ")";
            first = false;
        }
        os << "\n";
    }
    for (int s = 0; s < n; ++s) {
        if (!g.is_deceiver(s) || posg.is_target[s]) continue;
        for (const auto& row : g.rows[s]) {
            os << " eq6_" << s << "_" << row.action << ": c_" << s;
            for (const auto& [succ, prob] : row.successors)
                os << " - " << num17(g.discount * to_double(prob)) << " c_" << succ;
            os << " - " << num17(big_m) << " d_" << s << "_" << row.action
               << " >= " << num17(row.cost - big_m) << "\n";
            os << " eq7_" << s << "_" << row.action << ": c_" << s;
            for (const auto& [succ, prob] : row.successors)
                os << " - " << num17(g.discount * to_double(prob)) << " c_" << succ;
            os << " + " << num17(big_m) << " d_" << s << "_" << row.action
               << " <= " << num17(row.cost + big_m) << "\n";
        }
    }
    os << "Binaries\n";
    for (int s = 0; s < n; ++s) {
        if (!g.is_deceiver(s)) continue;
        for (const auto& row : g.rows[s]) os << " d_" << s << "_" << row.action << "\n";
    }
    os << "End\n";
    return os.str();
}

double min_deactivated_slack(const OneSidedPosg& posg,
                             const std::vector<InfiltratorStrategy>& strategies,
                             const MilpProblem& p, const DeceiverStrategy& d) {
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p.num_strategies; ++i) {
        CostVector cost = evaluate_cost(posg, d, strategies[i]);
        for (const auto& pair : p.bigm_pairs) {
            if (pair.strategy != i) continue;
            if (d.choice[pair.state] == pair.action) continue;  // active pair
            double bellman = pair.cost;
            for (const auto& [succ, prob] : pair.successor_probs)
                bellman += p.discount * prob * cost.at(succ);
            double c = cost.at(pair.state);
            // Eq 18 slack: c - (bellman - M); Eq 19 slack: (bellman + M) - c.
            worst = std::min(worst, c - bellman + p.big_m);
            worst = std::min(worst, bellman + p.big_m - c);
        }
    }
    return worst;
}

}  // namespace decgame
