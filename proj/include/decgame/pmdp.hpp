#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "decgame/model.hpp"

namespace decgame {

/// One ObAct probability parameter p^z_i.
struct Parameter {
    std::string name;
    int observation = -1;
    int action_index = 1;  // 1-based position within the observation's block
};

/// Multivariate polynomial over parameters with exact rational coefficients,
/// kept in canonical form (terms sorted, like terms merged, no zeros).
class PolynomialExpr {
  public:
    // monomial: sorted vector of parameter indices (with multiplicity)
    using Monomial = std::vector<int>;

    PolynomialExpr() = default;
    static PolynomialExpr constant(Rational value);
    static PolynomialExpr variable(int parameter_index);

    PolynomialExpr& operator+=(const PolynomialExpr& other);
    PolynomialExpr operator+(const PolynomialExpr& other) const;
    PolynomialExpr operator-(const PolynomialExpr& other) const;
    PolynomialExpr operator*(const PolynomialExpr& other) const;
    PolynomialExpr scaled(const Rational& factor) const;

    bool operator==(const PolynomialExpr& other) const { return terms_ == other.terms_; }

    int degree() const;
    bool is_constant() const { return degree() == 0; }
    Rational constant_value() const;
    bool depends_on_parameters() const { return degree() >= 1; }

    /// Exact evaluation; parameter values are converted to exact rationals
    /// (every double is one) so only the final conversion rounds.
    Rational evaluate(const std::vector<Rational>& values) const;

    /// Gradient coefficient of an affine expression w.r.t. one parameter.
    /// Throws DomainError when degree > 1.
    Rational affine_coefficient(int parameter_index) const;

    const std::map<Monomial, Rational>& terms() const { return terms_; }
    std::string to_string(const std::vector<Parameter>& params) const;

  private:
    std::map<Monomial, Rational> terms_;
    void prune();
};

/// Block of metadata for one observation in the reduction: actions in the
/// order their ObAct probabilities are numbered, and the parameter index for
/// each position except the last (which carries the remainder 1 - sum).
struct ObservationBlock {
    int observation = -1;
    std::vector<int> actions;     // descending action id; actions[i] ~ p^z_{i+1}
    std::vector<int> parameters;  // size actions.size()-1; empty when single action
};

/// MDP whose transition probabilities (and, on collapsed infiltrator rows,
/// costs) are polynomials over ObAct parameters. Produced from a POSG by
/// posg_to_pmdp; player tags, observations, targets and discount carry over.
struct ParametricMdp {
    std::vector<std::string> state_names;
    std::vector<Player> player;
    std::vector<std::string> action_names;  // original actions plus "bot" when used
    int initial = 0;
    double discount = 0.0;
    std::vector<std::string> observation_names;
    std::vector<int> obs_of;
    std::vector<char> is_target;

    struct Row {
        int action = -1;
        PolynomialExpr cost;
        std::vector<std::pair<int, PolynomialExpr>> successors;
    };
    std::vector<std::vector<Row>> rows;  // per state

    std::vector<Parameter> parameters;
    std::vector<ObservationBlock> blocks;  // one per observation with >= 2 actions

    int num_states() const { return static_cast<int>(state_names.size()); }
    int num_parameters() const { return static_cast<int>(parameters.size()); }
    int parameter_index(const std::string& name) const;
    const ObservationBlock* block_for(int observation) const;
};

/// Parameter valuation, indexed like ParametricMdp::parameters.
struct Instantiation {
    std::vector<double> values;
};

/// Reduction: deceiver states keep their actions with constant expressions;
/// every observation with m >= 2 enabled actions collapses its states to a
/// single action whose successor expressions mix the original rows with
/// f^z_1..f^z_m, where f^z_i = p^z_i for i < m and the last is 1 - sum.
/// ObAct probabilities are numbered against actions in descending id order.
ParametricMdp posg_to_pmdp(const OneSidedPosg& posg);

/// Evaluates every expression at u and returns the resulting game (player
/// tags and observations preserved; infiltrator states single-action).
/// Throws InstantiationError listing offending (state, successor) entries
/// when a probability leaves [-1e-9, 1+1e-9] or a row sum is off by > 1e-9.
OneSidedPosg instantiate(const ParametricMdp& pmdp, const Instantiation& u);

/// The memoryless infiltrator strategy induced by u: ObAct probabilities per
/// observation, remainder on the lowest-id action. Single-action
/// observations map to probability 1.
InfiltratorStrategy istrat(const ParametricMdp& pmdp, const Instantiation& u);

/// Checks that u yields probabilities; returns human-readable problems
/// (empty if well-defined).
std::vector<std::string> well_definedness_issues(const ParametricMdp& pmdp, const Instantiation& u);

}  // namespace decgame
