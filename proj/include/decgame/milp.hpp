#pragma once

#include <string>
#include <vector>

#include "decgame/model.hpp"

namespace decgame {

/// Stage-2 program against N fixed infiltrator strategies: one-hot action
/// binaries per deceiver state coupled across N cost-variable blocks through
/// big-M activation pairs. The objective min-max is linearized with a single
/// auxiliary scalar t and one linking row per strategy.
struct MilpProblem {
    int num_strategies = 0;
    int num_states = 0;
    int initial = 0;
    double discount = 0.0;
    double big_m = 0.0;

    struct Binary {
        int state;
        int action;
    };
    std::vector<Binary> binaries;  // delta_{s,a}, grouped by state

    struct OneHotRow {
        int state;
        std::vector<int> binary_ids;
    };
    std::vector<OneHotRow> onehot_rows;

    /// c_i_s - sum coeff * c_i_s' = rhs (no discount on these rows).
    struct InfiltratorRow {
        int strategy;
        int state;
        double rhs;
        std::vector<std::pair<int, double>> successor_coeffs;
    };
    std::vector<InfiltratorRow> eq17_rows;

    /// Activation pair: c_i_s >=/<= cost + discount*sum(P c) -+ M(1-delta).
    struct BigMPair {
        int strategy;
        int state;
        int action;
        int binary_id;
        double cost;
        std::vector<std::pair<int, double>> successor_probs;
    };
    std::vector<BigMPair> bigm_pairs;

    std::vector<int> boundary_states;  // c_i_s = 0 for every i

    int binary_index(int state, int action) const;
};

/// M = 2*Cmax/(1-gamma) + 1 with Cmax the largest cost magnitude; bounds
/// every feasible cost variable so deactivated pairs go slack.
double compute_big_m(const OneSidedPosg& posg);

/// Assembles the program. All strategies must be memoryless on this game's
/// observation space (unfold first for finite memory); sets mixing memory
/// sizes are refused.
MilpProblem build_milp(const OneSidedPosg& posg, const std::vector<InfiltratorStrategy>& strategies,
                       double big_m);

/// LP-format text of the program (rows onehot_/eq17_/m18_/m19_/tmax_,
/// 17-significant-digit coefficients, binaries declared; deterministic).
std::string export_milp(const MilpProblem& problem);

/// Annotated text of the robust program over a symbolic infiltrator
/// strategy; infiltrator cost rows are marked "uncertain". Documentation
/// export only, no solver consumes it.
std::string build_robust_milp_export(const OneSidedPosg& posg);

/// Smallest slack over all deactivated activation pairs at the exact cost
/// vectors of d; negative means a big-M row binds where it should not.
double min_deactivated_slack(const OneSidedPosg& posg,
                             const std::vector<InfiltratorStrategy>& strategies,
                             const MilpProblem& problem, const DeceiverStrategy& d);

}  // namespace decgame
