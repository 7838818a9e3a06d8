#include "decgame/nlp.hpp"

namespace decgame {

NlpProblem build_nlp(const ParametricMdp& pmdp, double kappa) {
    NlpProblem nlp;
    nlp.pmdp = &pmdp;
    nlp.kappa = kappa;

    for (int s = 0; s < pmdp.num_states(); ++s) {
        if (pmdp.is_target[s]) {
            nlp.boundary_states.push_back(s);
            continue;
        }
        for (const auto& row : pmdp.rows[s]) {
            bool parametric_row = row.cost.depends_on_parameters();
            PolynomialExpr sum;
            for (const auto& [succ, expr] : row.successors) {
                if (expr.degree() > 1)
                    throw DomainError("unsupported degree: transition expression at state '" +
                                      pmdp.state_names[s] + "' is not affine");
                sum += expr;
                if (expr.depends_on_parameters()) {
                    parametric_row = true;
                    nlp.nonneg_rows.push_back({s, row.action, succ, expr});
                }
            }
            if (sum.depends_on_parameters())
                nlp.normalization_rows.push_back({s, row.action, sum});
            (void)parametric_row;

            NlpProblem::BellmanRow bellman;
            bellman.state = s;
            bellman.action = row.action;
            bellman.cost = row.cost;
            bellman.successors = row.successors;
            bellman.gamma = pmdp.discount;
            nlp.bellman_rows.push_back(std::move(bellman));
        }
    }
    return nlp;
}

}  // namespace decgame
