#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "decgame/model.hpp"
#include "decgame/nlp.hpp"
#include "decgame/pmdp.hpp"
#include "decgame/unfold.hpp"

namespace decgame {

struct SynthesisConfig {
    /// Strength threshold kappa. NaN means "value of the uniform infiltrator
    /// strategy under deceiver best response", computed per instance.
    double strength_threshold = std::numeric_limits<double>::quiet_NaN();
    int restarts = 48;
    int ccp_max_iters = 12;
    double penalty_initial = 10.0;
    double penalty_growth = 2.0;
    double convergence_tol = 1e-6;
    double dedup_distance = 0.05;  // L-inf on full parameter vectors
    std::uint64_t rng_seed = 12345;
    int memory_k = 1;
    bool allow_weak_fill = false;
    int max_strategies = 10;  // N
};

/// Raised when no strategy clears kappa and weak fill is disabled.
struct NoStrongStrategyError : Error {
    double best_value;
    explicit NoStrongStrategyError(double best)
        : Error("no sufficiently strong strategy found; best value seen " + std::to_string(best)),
          best_value(best) {}
};

struct CcpStart {
    Instantiation params;
    std::optional<CostVector> cost_guess;  // defaults to evaluation at params
};

struct CcpOutcome {
    Instantiation point;
    int iterations = 0;
    bool converged = false;
    double final_penalty = 0.0;
    double max_slack = 0.0;
    std::vector<double> penalty_trace;  // penalty weight per iteration
};

/// Penalty sequential linearization on the synthesis program: each round
/// linearizes the bilinear transition*cost terms around the current iterate,
/// solves the slack-penalized LP inside a trust box, re-evaluates exactly,
/// and grows the penalty while slacks remain. The returned point is clamped
/// and renormalized to a well-defined instantiation.
CcpOutcome ccp_solve(const NlpProblem& nlp, const CcpStart& start, const SynthesisConfig& cfg);

/// Exact strength check: value of the deceiver's best response to
/// istrat(u) at the initial state, and whether it reaches kappa.
std::pair<bool, double> verify_strong(const OneSidedPosg& posg, const Instantiation& u,
                                      double kappa);
std::pair<bool, double> verify_strong(const OneSidedPosg& posg, const ParametricMdp& pmdp,
                                      const Instantiation& u, double kappa);

struct SynthesizedStrategy {
    InfiltratorStrategy strategy;
    double value = 0.0;  // verified best-response value at the initial state
    Instantiation instantiation;
    bool strong = false;
};

struct SynthesisStats {
    int restarts_used = 0;
    long ccp_iterations = 0;
    double wall_time_s = 0.0;
};

struct SynthesisResult {
    std::vector<SynthesizedStrategy> strategies;  // value-descending
    SynthesisStats stats;
    double kappa = 0.0;
    int k = 1;
    UnfoldedPosg unfolded;
    ParametricMdp pmdp;
};

/// Stage 1 end to end: unfold to cfg.memory_k, reduce, run seeded CCP
/// restarts, verify every candidate exactly, dedup by L-inf distance and
/// return up to max_strategies entries sorted by verified value. Weak
/// candidates are appended (flagged) only when allow_weak_fill is set.
SynthesisResult generate_strategy_set(const OneSidedPosg& posg, const SynthesisConfig& cfg);

/// kappa default: value of the uniform-random infiltrator strategy under
/// deceiver best response on the (unfolded) game.
double uniform_strategy_value(const OneSidedPosg& posg, const ParametricMdp& pmdp);

/// Uniform-interior instantiation (all ObAct probabilities equal per
/// observation).
Instantiation uniform_instantiation(const ParametricMdp& pmdp);

}  // namespace decgame
