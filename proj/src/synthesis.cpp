#include "decgame/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "decgame/evaluate.hpp"
#include "decgame/lp.hpp"
#include "decgame/validate.hpp"

namespace decgame {

namespace {

constexpr double kSlackTol = 1e-7;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform01() {  // in (0,1); avoids library distribution quirks
        return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
    }
    double exponential() { return -std::log(uniform01()); }
};

/// Cost-variable bound used to box the LP: costs cannot exceed
/// 2*Cmax/(1-gamma) in magnitude under alternation.
double cost_bound(const ParametricMdp& pmdp) {
    double cmax = 0.0;
    for (int s = 0; s < pmdp.num_states(); ++s) {
        for (const auto& row : pmdp.rows[s]) {
            double mag = 0.0;
            for (const auto& [mono, coef] : row.cost.terms()) mag += std::abs(to_double(coef));
            cmax = std::max(cmax, mag);
        }
    }
    return 2.0 * cmax / (1.0 - pmdp.discount) + 1.0;
}

/// Exact value of the deceiver's best response at u, plus the cost vector.
std::pair<double, CostVector> exact_value(const ParametricMdp& pmdp, const Instantiation& u) {
    OneSidedPosg mdp = instantiate(pmdp, u);
    DeceiverStrategy none;
    none.choice.assign(mdp.game.num_states(), -1);
    InfiltratorStrategy forced;
    forced.rows.assign(mdp.num_observations(), {});
    for (int s = 0; s < mdp.game.num_states(); ++s) {
        if (mdp.game.player[s] == Player::Deceiver) continue;
        int z = mdp.obs_of[s];
        if (z >= 0 && forced.rows[z].empty())
            forced.rows[z] = {{mdp.game.rows[s][0].action, 1.0}};
    }
    auto [strategy, cost] = best_response_deceiver(mdp, forced);
    (void)strategy;
    double v = cost.at(mdp.game.initial);
    return {v, std::move(cost)};
}

/// Projects raw parameters onto well-definedness: per observation block the
/// implied ObAct vector is clamped to >= 0 and renormalized.
Instantiation project(const ParametricMdp& pmdp, const std::vector<double>& raw) {
    Instantiation out;
    out.values.assign(pmdp.num_parameters(), 0.0);
    for (const auto& block : pmdp.blocks) {
        const std::size_t m = block.actions.size();
        std::vector<double> probs(m, 0.0);
        double rest = 1.0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            probs[i] = raw[block.parameters[i]];
            rest -= probs[i];
        }
        probs[m - 1] = rest;
        double sum = 0.0;
        for (auto& p : probs) {
            p = std::max(p, 0.0);
            sum += p;
        }
        if (sum <= 0.0) {
            for (auto& p : probs) p = 1.0 / static_cast<double>(m);
        } else {
            for (auto& p : probs) p /= sum;
        }
        for (std::size_t i = 0; i + 1 < m; ++i) out.values[block.parameters[i]] = probs[i];
    }
    return out;
}

}  // namespace

Instantiation uniform_instantiation(const ParametricMdp& pmdp) {
    std::vector<double> raw(pmdp.num_parameters(), 0.0);
    for (const auto& block : pmdp.blocks)
        for (int pidx : block.parameters)
            raw[pidx] = 1.0 / static_cast<double>(block.actions.size());
    return project(pmdp, raw);
}

double uniform_strategy_value(const OneSidedPosg& posg, const ParametricMdp& pmdp) {
    Instantiation u = uniform_instantiation(pmdp);
    return verify_strong(posg, pmdp, u, -std::numeric_limits<double>::infinity()).second;
}

std::pair<bool, double> verify_strong(const OneSidedPosg& posg, const ParametricMdp& pmdp,
                                      const Instantiation& u, double kappa) {
    InfiltratorStrategy sigma = istrat(pmdp, u);
    auto [strategy, cost] = best_response_deceiver(posg, sigma);
    (void)strategy;
    double value = cost.at(posg.game.initial);
    return {value >= kappa, value};
}

std::pair<bool, double> verify_strong(const OneSidedPosg& posg, const Instantiation& u,
                                      double kappa) {
    ParametricMdp pmdp = posg_to_pmdp(posg);
    return verify_strong(posg, pmdp, u, kappa);
}

// ---------------------------------------------------------------------------
// CCP
// ---------------------------------------------------------------------------

CcpOutcome ccp_solve(const NlpProblem& nlp, const CcpStart& start, const SynthesisConfig& cfg) {
    if (nlp.pmdp == nullptr) throw DomainError("ccp_solve: NLP has no pMDP attached");
    const ParametricMdp& pmdp = *nlp.pmdp;
    const int np = pmdp.num_parameters();

    CcpOutcome out;
    out.point = start.params;
    {
        auto issues = well_definedness_issues(pmdp, out.point);
        if (!issues.empty())
            throw InstantiationError("ccp_solve: start point ill-defined: " + issues.front());
    }
    if (pmdp.is_target[pmdp.initial] || np == 0) {
        out.converged = true;
        return out;
    }

    const double big = cost_bound(pmdp);
    double penalty = cfg.penalty_initial;
    double radius = 0.25;

    std::vector<double> u = out.point.values;
    auto [value, cost] = start.cost_guess.has_value()
                             ? std::make_pair(start.cost_guess->at(pmdp.initial), *start.cost_guess)
                             : exact_value(pmdp, out.point);

    // Cost variables only for non-target states.
    std::vector<int> cvar(pmdp.num_states(), -1);

    for (int iter = 0; iter < cfg.ccp_max_iters; ++iter) {
        out.penalty_trace.push_back(penalty);
        ++out.iterations;

        LinearProgram lp;
        // Parameters inside the trust box intersected with [0,1].
        std::vector<int> pvar(np);
        for (int j = 0; j < np; ++j)
            pvar[j] = lp.add_variable(std::max(0.0, u[j] - radius), std::min(1.0, u[j] + radius), 0.0);
        for (int s = 0; s < pmdp.num_states(); ++s)
            if (!pmdp.is_target[s])
                cvar[s] = lp.add_variable(-big, big, s == pmdp.initial ? 1.0 : 0.0);

        // Simplex rows per observation block: sum of free ObAct probabilities
        // stays <= 1 (the remainder action absorbs the rest).
        for (const auto& block : pmdp.blocks) {
            std::vector<std::pair<int, double>> row;
            for (int pidx : block.parameters) row.emplace_back(pvar[pidx], 1.0);
            lp.add_row(std::move(row), 1.0);
        }
        // General parametric rows for hand-built pMDPs whose parameters are
        // not covered by observation blocks.
        {
            std::vector<char> covered(np, 0);
            for (const auto& block : pmdp.blocks)
                for (int pidx : block.parameters) covered[pidx] = 1;
            bool all_covered = true;
            for (int j = 0; j < np; ++j) all_covered = all_covered && covered[j];
            if (!all_covered) {
                for (const auto& r : nlp.nonneg_rows) {
                    std::vector<std::pair<int, double>> row;
                    for (int j = 0; j < np; ++j) {
                        double a = to_double(r.expr.affine_coefficient(j));
                        if (a != 0.0) row.emplace_back(pvar[j], -a);
                    }
                    lp.add_row(std::move(row), to_double(r.expr.constant_value()));
                }
                for (const auto& r : nlp.normalization_rows) {
                    std::vector<std::pair<int, double>> fwd, bwd;
                    for (int j = 0; j < np; ++j) {
                        double a = to_double(r.sum.affine_coefficient(j));
                        if (a != 0.0) {
                            fwd.emplace_back(pvar[j], a);
                            bwd.emplace_back(pvar[j], -a);
                        }
                    }
                    double c0 = to_double(r.sum.constant_value());
                    lp.add_row(std::move(fwd), 1.0 - c0);
                    lp.add_row(std::move(bwd), c0 - 1.0);
                }
            }
        }

        // Bellman rows, oriented toward the deceiver's minimization (value
        // sub-solution side) with the discount on deceiver rows only, so the
        // LP value tracks the quantity the exact verifier measures. Bilinear
        // expr*cost terms are expanded to first order around (u, cost).
        std::vector<Rational> u_rat;
        u_rat.reserve(np);
        for (double v : u) u_rat.push_back(rational_from_double(v));
        int slack_count = 0;
        for (const auto& r : nlp.bellman_rows) {
            bool deceiver = pmdp.player[r.state] == Player::Deceiver;
            double gamma_row = deceiver ? pmdp.discount : 1.0;
            std::vector<std::pair<int, double>> row;
            double rhs = 0.0;
            auto add_coeff = [&row](int var, double coeff) {
                if (coeff == 0.0) return;
                for (auto& [v, c] : row)
                    if (v == var) {
                        c += coeff;
                        return;
                    }
                row.emplace_back(var, coeff);
            };
            add_coeff(cvar[r.state], 1.0);
            // cost expression: affine in u, kept exact
            rhs += to_double(r.cost.constant_value());
            for (int j = 0; j < np; ++j) {
                double a = to_double(r.cost.affine_coefficient(j));
                if (a != 0.0) add_coeff(pvar[j], -a);
            }
            for (const auto& [succ, expr] : r.successors) {
                if (pmdp.is_target[succ]) continue;  // c fixed to 0
                double e_now = to_double(expr.evaluate(u_rat));
                double c_now = cost.at(succ);
                // expr(u)*c ~ e_now*c + (expr(u) - e_now)*c_now
                add_coeff(cvar[succ], -gamma_row * e_now);
                for (int j = 0; j < np; ++j) {
                    double a = to_double(expr.affine_coefficient(j));
                    if (a != 0.0) add_coeff(pvar[j], -gamma_row * a * c_now);
                }
                double e_const = to_double(expr.constant_value());
                rhs += gamma_row * (e_const - e_now) * c_now;
            }
            bool parametric = r.cost.depends_on_parameters();
            for (const auto& [succ, expr] : r.successors)
                parametric = parametric || expr.depends_on_parameters();
            if (parametric) {
                int svar = lp.add_variable(0.0, 4.0 * big, -penalty);
                add_coeff(svar, -1.0);
                ++slack_count;
            }
            lp.add_row(std::move(row), rhs);
        }
        (void)slack_count;

        LpResult sol = solve_lp(lp);
        if (!sol.ok())
            throw InternalError("ccp_solve: LP subproblem failed (status " +
                                std::to_string(static_cast<int>(sol.status)) + ")");

        std::vector<double> raw(np);
        for (int j = 0; j < np; ++j) raw[j] = sol.x[pvar[j]];
        Instantiation cand = project(pmdp, raw);

        // Slack magnitudes: anything the LP paid penalty for.
        double slack_max = 0.0;
        for (int v = 0; v < lp.num_vars; ++v)
            if (lp.objective[v] < 0.0) slack_max = std::max(slack_max, sol.x[v]);
        out.max_slack = slack_max;

        double movement = 0.0;
        for (int j = 0; j < np; ++j) movement = std::max(movement, std::abs(cand.values[j] - u[j]));

        auto [cand_value, cand_cost] = exact_value(pmdp, cand);
        if (cand_value >= value - 1e-12) {
            u = cand.values;
            value = cand_value;
            cost = std::move(cand_cost);
            radius = std::min(radius * 1.5, 0.4);
        } else {
            radius *= 0.4;
            if (radius < 1e-3) {
                out.converged = true;
                break;
            }
            movement = std::numeric_limits<double>::infinity();  // keep iterating
        }
        if (slack_max > kSlackTol) penalty *= cfg.penalty_growth;
        if (movement < cfg.convergence_tol) {
            out.converged = true;
            break;
        }
    }
    out.final_penalty = penalty;
    out.point.values = u;
    return out;
}

// ---------------------------------------------------------------------------
// Stage 1 driver
// ---------------------------------------------------------------------------

SynthesisResult generate_strategy_set(const OneSidedPosg& posg, const SynthesisConfig& cfg) {
    require_valid(posg);
    if (cfg.restarts < 1) throw DomainError("restarts must be >= 1");
    if (cfg.dedup_distance <= 0.0) throw DomainError("dedup distance must be positive");
    if (cfg.penalty_growth <= 1.0) throw DomainError("penalty growth must exceed 1");
    auto t0 = std::chrono::steady_clock::now();

    SynthesisResult result;
    result.k = cfg.memory_k;
    result.unfolded = unfold_memory(posg, cfg.memory_k);
    const OneSidedPosg& game = result.unfolded.posg;
    result.pmdp = posg_to_pmdp(game);
    const ParametricMdp& pmdp = result.pmdp;

    double kappa = cfg.strength_threshold;
    if (std::isnan(kappa)) kappa = uniform_strategy_value(game, pmdp);
    result.kappa = kappa;

    NlpProblem nlp = build_nlp(pmdp, kappa);

    struct Candidate {
        Instantiation u;
        double value;
        bool strong;
        int restart;
    };
    std::vector<Candidate> candidates(cfg.restarts);

    for (int r = 0; r < cfg.restarts; ++r) {
        Rng rng(splitmix64(cfg.rng_seed + 0x5851f42d4c957f2dULL * static_cast<std::uint64_t>(r)));
        // Dirichlet(1,..,1) interior start per observation block.
        std::vector<double> raw(pmdp.num_parameters(), 0.0);
        for (const auto& block : pmdp.blocks) {
            const std::size_t m = block.actions.size();
            std::vector<double> w(m);
            double sum = 0.0;
            for (auto& x : w) {
                x = rng.exponential();
                sum += x;
            }
            for (std::size_t i = 0; i + 1 < m; ++i) raw[block.parameters[i]] = w[i] / sum;
        }
        CcpStart start;
        start.params = project(pmdp, raw);
        CcpOutcome ccp = ccp_solve(nlp, start, cfg);
        auto [strong, value] = verify_strong(game, pmdp, ccp.point, kappa);
        candidates[r] = Candidate{std::move(ccp.point), value, strong, r};
        result.stats.ccp_iterations += ccp.iterations;
    }
    result.stats.restarts_used = cfg.restarts;

    std::vector<int> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (candidates[a].value != candidates[b].value)
            return candidates[a].value > candidates[b].value;
        return candidates[a].restart < candidates[b].restart;
    });

    auto linf = [](const Instantiation& a, const Instantiation& b) {
        double d = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i)
            d = std::max(d, std::abs(a.values[i] - b.values[i]));
        return d;
    };

    auto keep_pass = [&](bool want_strong) {
        for (int idx : order) {
            if (static_cast<int>(result.strategies.size()) >= cfg.max_strategies) break;
            const Candidate& c = candidates[idx];
            if (c.strong != want_strong) continue;
            bool distinct = true;
            for (const auto& kept : result.strategies)
                if (linf(c.u, kept.instantiation) < cfg.dedup_distance) {
                    distinct = false;
                    break;
                }
            if (!distinct) continue;
            SynthesizedStrategy s;
            s.strategy = istrat(pmdp, c.u);
            s.strategy.memory_nodes = cfg.memory_k;
            s.value = c.value;
            s.instantiation = c.u;
            s.strong = c.strong;
            result.strategies.push_back(std::move(s));
        }
    };
    keep_pass(/*want_strong=*/true);
    if (result.strategies.empty() && !cfg.allow_weak_fill) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& c : candidates) best = std::max(best, c.value);
        throw NoStrongStrategyError(best);
    }
    if (cfg.allow_weak_fill) keep_pass(/*want_strong=*/false);

    auto t1 = std::chrono::steady_clock::now();
    result.stats.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    return result;
}

}  // namespace decgame
