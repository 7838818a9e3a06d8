#pragma once

#include <vector>

#include "decgame/pmdp.hpp"

namespace decgame {

/// The strategy-synthesis program over a reduction pMDP: cost variables per
/// state plus the ObAct parameters; maximize the cost at the initial state
/// subject to the threshold, boundary, well-definedness rows and per-action
/// Bellman inequalities c_s >= C(s,a) + gamma * sum P(s,a,s') c_s'. This is
/// the search program handed to the CCP loop; the exact best-response
/// verifier remains the binding strength check.
struct NlpProblem {
    const ParametricMdp* pmdp = nullptr;
    double kappa = 0.0;

    std::vector<int> boundary_states;  // c_s = 0 rows

    struct NonnegRow {  // parametric transition expression >= 0
        int state;
        int action;
        int successor;
        PolynomialExpr expr;
    };
    std::vector<NonnegRow> nonneg_rows;

    struct NormalizationRow {  // parametric row sum == 1
        int state;
        int action;
        PolynomialExpr sum;
    };
    std::vector<NormalizationRow> normalization_rows;

    struct BellmanRow {
        int state;
        int action;
        PolynomialExpr cost;
        std::vector<std::pair<int, PolynomialExpr>> successors;
        double gamma;  // discount as written on the row
    };
    std::vector<BellmanRow> bellman_rows;

    /// boundary + parameter rows + Bellman rows + the threshold row.
    int constraint_count() const {
        return static_cast<int>(boundary_states.size() + nonneg_rows.size() +
                                normalization_rows.size() + bellman_rows.size()) +
               1;
    }
};

/// Assembles the program. Requires affine transition expressions (the
/// reduction only emits affine ones); throws DomainError("unsupported
/// degree...") otherwise. Target states get boundary rows and no Bellman
/// rows.
NlpProblem build_nlp(const ParametricMdp& pmdp, double kappa);

}  // namespace decgame
