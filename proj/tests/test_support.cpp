#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "decgame/evaluate.hpp"
#include "decgame/validate.hpp"

namespace decgame::testing {

namespace {

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(gen() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double uniform01() { return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53; }
};

/// Sparse distribution over the given candidates with small rational weights.
std::vector<std::pair<int, Rational>> random_distribution(Rng& rng, const std::vector<int>& candidates) {
    int support = rng.uniform_int(1, std::min<int>(3, static_cast<int>(candidates.size())));
    std::vector<int> picked;
    std::vector<int> pool = candidates;
    for (int i = 0; i < support; ++i) {
        int at = rng.uniform_int(0, static_cast<int>(pool.size()) - 1);
        picked.push_back(pool[at]);
        pool.erase(pool.begin() + at);
    }
    std::vector<int> weights(picked.size());
    int total = 0;
    for (auto& w : weights) {
        w = rng.uniform_int(1, 9);
        total += w;
    }
    std::vector<std::pair<int, Rational>> out;
    for (std::size_t i = 0; i < picked.size(); ++i)
        out.emplace_back(picked[i], Rational(weights[i], total));
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

}  // namespace

OneSidedPosg random_game(std::uint64_t seed, const RandomGameOptions& opt) {
    Rng rng(seed);
    OneSidedPosg posg;
    StochasticGame& g = posg.game;

    // Acyclic mode pairs the sides into levels d0,i0,d1,i1,... with edges
    // only forward, so every observation occurs at most once per path.
    const int levels = opt.acyclic ? rng.uniform_int(3, 5) : 0;
    const int nd = opt.acyclic ? levels : rng.uniform_int(1, opt.max_deceiver_states);
    const int ni = opt.acyclic ? levels : rng.uniform_int(1, opt.max_infiltrator_states);
    const int num_actions = rng.uniform_int(opt.acyclic ? 2 : 1, opt.max_actions);
    for (int a = 0; a < num_actions; ++a) g.action_names.push_back("a" + std::to_string(a));

    for (int i = 0; i < nd; ++i) {
        g.state_names.push_back("d" + std::to_string(i));
        g.player.push_back(Player::Deceiver);
    }
    for (int i = 0; i < ni; ++i) {
        g.state_names.push_back("i" + std::to_string(i));
        g.player.push_back(Player::Infiltrator);
    }
    const int n = g.num_states();
    g.rows.assign(n, {});
    posg.obs_of.assign(n, -1);
    posg.is_target.assign(n, 0);
    g.initial = 0;
    g.discount = opt.min_discount + (opt.max_discount - opt.min_discount) * rng.uniform01();

    // Observation partition with shared enabled-action sets per observation.
    // In acyclic mode every infiltrator state gets its own observation.
    const int num_obs = opt.acyclic ? ni : rng.uniform_int(1, std::min(ni, opt.max_observations));
    std::vector<std::vector<int>> obs_actions(num_obs);
    for (int z = 0; z < num_obs; ++z) {
        posg.observation_names.push_back("z" + std::to_string(z));
        int count = rng.uniform_int(opt.acyclic ? 2 : 1, num_actions);
        std::vector<int> pool;
        for (int a = 0; a < num_actions; ++a) pool.push_back(a);
        for (int c = 0; c < count; ++c) {
            int at = rng.uniform_int(0, static_cast<int>(pool.size()) - 1);
            obs_actions[z].push_back(pool[at]);
            pool.erase(pool.begin() + at);
        }
        std::sort(obs_actions[z].begin(), obs_actions[z].end());
    }
    for (int i = 0; i < ni; ++i) {
        int z = i < num_obs ? i : rng.uniform_int(0, num_obs - 1);  // every obs inhabited
        posg.obs_of[nd + i] = z;
    }

    std::vector<int> dec_states(nd), inf_states(ni);
    for (int i = 0; i < nd; ++i) dec_states[i] = i;
    for (int i = 0; i < ni; ++i) inf_states[i] = nd + i;

    auto successors_for = [&](int s) -> std::vector<int> {
        if (!opt.acyclic) return g.is_deceiver(s) ? inf_states : dec_states;
        int level = g.is_deceiver(s) ? s : s - nd;
        std::vector<int> out;
        if (g.is_deceiver(s)) {  // d_l -> i_m, m >= l
            for (int m = level; m < levels; ++m) out.push_back(nd + m);
        } else {  // i_l -> d_m, m > l (the last level loops on the target pair)
            for (int m = level + 1; m < levels; ++m) out.push_back(m);
            if (out.empty()) out.push_back(levels - 1);
        }
        return out;
    };

    for (int s = 0; s < n; ++s) {
        std::vector<int> actions;
        if (g.is_deceiver(s)) {
            int count = rng.uniform_int(1, num_actions);
            std::vector<int> pool;
            for (int a = 0; a < num_actions; ++a) pool.push_back(a);
            for (int c = 0; c < count; ++c) {
                int at = rng.uniform_int(0, static_cast<int>(pool.size()) - 1);
                actions.push_back(pool[at]);
                pool.erase(pool.begin() + at);
            }
            std::sort(actions.begin(), actions.end());
        } else {
            actions = obs_actions[posg.obs_of[s]];
        }
        for (int a : actions) {
            ActionRow row;
            row.action = a;
            row.cost = std::round((rng.uniform01() * 2.0 - 1.0) * opt.max_abs_cost * 4.0) / 4.0;
            row.successors = random_distribution(rng, successors_for(s));
            g.rows[s].push_back(std::move(row));
        }
    }

    if (opt.acyclic) {
        // Last level on both sides absorbs, making every path finite.
        posg.is_target[nd - 1] = 1;
        posg.is_target[n - 1] = 1;
    } else if (opt.allow_targets && rng.uniform_int(0, 2) == 0) {
        int count = rng.uniform_int(1, std::max(1, n / 4));
        for (int c = 0; c < count; ++c) {
            int s = rng.uniform_int(0, n - 1);
            if (s == g.initial) continue;
            posg.is_target[s] = 1;
        }
    }

    require_valid(posg);
    return posg;
}

InfiltratorStrategy random_strategy(const OneSidedPosg& posg, std::uint64_t seed) {
    Rng rng(seed);
    InfiltratorStrategy s;
    s.rows.assign(posg.num_observations(), {});
    for (int st = 0; st < posg.game.num_states(); ++st) {
        if (posg.game.is_deceiver(st)) continue;
        int z = posg.obs_of[st];
        if (!s.rows[z].empty()) continue;
        auto actions = posg.game.enabled_actions(st);
        std::vector<double> w(actions.size());
        double total = 0.0;
        for (auto& x : w) {
            x = rng.uniform01() + 1e-3;
            total += x;
        }
        for (std::size_t i = 0; i < actions.size(); ++i) s.rows[z].emplace_back(actions[i], w[i] / total);
    }
    return s;
}

DeceiverStrategy random_deceiver(const OneSidedPosg& posg, std::uint64_t seed) {
    Rng rng(seed);
    DeceiverStrategy d;
    d.choice.assign(posg.game.num_states(), -1);
    for (int s = 0; s < posg.game.num_states(); ++s) {
        if (!posg.game.is_deceiver(s)) continue;
        const auto& rows = posg.game.rows[s];
        d.choice[s] = rows[rng.uniform_int(0, static_cast<int>(rows.size()) - 1)].action;
    }
    return d;
}

Instantiation random_instantiation(const ParametricMdp& pmdp, std::uint64_t seed) {
    Rng rng(seed);
    Instantiation u;
    u.values.assign(pmdp.num_parameters(), 0.0);
    for (const auto& block : pmdp.blocks) {
        std::vector<double> w(block.actions.size());
        double total = 0.0;
        for (auto& x : w) {
            x = -std::log(rng.uniform01());
            total += x;
        }
        for (std::size_t i = 0; i + 1 < block.actions.size(); ++i)
            u.values[block.parameters[i]] = w[i] / total;
    }
    return u;
}

OneSidedPosg fig4_game() {
    OneSidedPosg posg;
    StochasticGame& g = posg.game;
    g.state_names = {"s0", "s1", "s2", "s3", "s4", "s5"};
    g.player = {Player::Infiltrator, Player::Infiltrator, Player::Deceiver,
                Player::Infiltrator, Player::Deceiver, Player::Deceiver};
    g.action_names = {"a1", "a2", "a3", "b1", "b2"};
    g.initial = 0;
    g.discount = 0.9;
    posg.observation_names = {"blue", "red"};
    posg.obs_of = {0, 1, -1, 1, -1, -1};
    posg.is_target = {0, 0, 0, 0, 0, 0};
    g.rows.assign(6, {});

    auto half = Rational(1, 2);
    auto one = Rational(1);
    // s0: a1 -> s5; a2 -> 0.5 s2 + 0.5 s4; a3 -> s4
    g.rows[0].push_back({0, 0.0, {{5, one}}});
    g.rows[0].push_back({1, 0.0, {{2, half}, {4, half}}});
    g.rows[0].push_back({2, 0.0, {{4, one}}});
    // s1: a1 -> s2; a2 -> 0.5 s5 + 0.5 s2
    g.rows[1].push_back({0, 0.0, {{2, one}}});
    g.rows[1].push_back({1, 0.0, {{2, half}, {5, half}}});
    // s3: a1 -> s2; a2 -> s4
    g.rows[3].push_back({0, 0.0, {{2, one}}});
    g.rows[3].push_back({1, 0.0, {{4, one}}});
    // deceiver states: s2 single action to s3; s4 -> {s3, s0}; s5 -> {s1, s0}
    g.rows[2].push_back({3, 0.0, {{3, one}}});
    g.rows[4].push_back({3, 0.0, {{3, one}}});
    g.rows[4].push_back({4, 0.0, {{0, one}}});
    g.rows[5].push_back({3, 0.0, {{1, one}}});
    g.rows[5].push_back({4, 0.0, {{0, one}}});
    return posg;
}

std::vector<double> linear_solve_cost(const OneSidedPosg& posg, const DeceiverStrategy& d,
                                      const InfiltratorStrategy& sigma) {
    const StochasticGame& g = posg.game;
    const int n = g.num_states();
    // c = b + A c with the discount on deceiver rows; targets pinned to 0.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (int s = 0; s < n; ++s) {
        a[s][s] = 1.0;
        if (posg.is_target[s]) continue;
        if (g.is_deceiver(s)) {
            const ActionRow* row = g.find_row(s, d.choice[s]);
            if (row == nullptr) throw std::runtime_error("incomplete strategy in oracle");
            a[s][n] += row->cost;
            for (const auto& [succ, p] : row->successors)
                a[s][succ] -= g.discount * to_double(p);
        } else {
            int z = posg.obs_of[s];
            for (const auto& [act, p] : sigma.rows.at(z)) {
                if (p == 0.0) continue;
                const ActionRow* row = g.find_row(s, act);
                a[s][n] += p * row->cost;
                for (const auto& [succ, q] : row->successors) a[s][succ] -= p * to_double(q);
            }
        }
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        if (std::abs(a[col][col]) < 1e-12) throw std::runtime_error("singular system in oracle");
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> x(n);
    for (int s = 0; s < n; ++s) x[s] = a[s][n] / a[s][s];
    return x;
}

std::vector<DeceiverStrategy> all_deceiver_strategies(const OneSidedPosg& posg) {
    const StochasticGame& g = posg.game;
    std::vector<int> free_states;
    for (int s = 0; s < g.num_states(); ++s)
        if (g.is_deceiver(s) && !posg.is_target[s]) free_states.push_back(s);

    DeceiverStrategy base;
    base.choice.assign(g.num_states(), -1);
    for (int s = 0; s < g.num_states(); ++s)
        if (g.is_deceiver(s)) base.choice[s] = g.rows[s].front().action;

    std::vector<DeceiverStrategy> out;
    std::vector<std::size_t> pos(free_states.size(), 0);
    while (true) {
        DeceiverStrategy d = base;
        for (std::size_t i = 0; i < free_states.size(); ++i)
            d.choice[free_states[i]] = g.rows[free_states[i]][pos[i]].action;
        out.push_back(d);
        bool advanced = false;
        std::size_t i = free_states.size();
        while (i > 0) {
            --i;
            if (++pos[i] < g.rows[free_states[i]].size()) {
                advanced = true;
                break;
            }
            pos[i] = 0;
        }
        if (!advanced) break;
    }
    return out;
}

double enumerate_min_value(const OneSidedPosg& posg, const InfiltratorStrategy& s) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& d : all_deceiver_strategies(posg))
        best = std::min(best, evaluate_cost(posg, d, s).at(posg.game.initial));
    return best;
}

}  // namespace decgame::testing
