#pragma once

#include <utility>
#include <vector>

#include "decgame/model.hpp"

namespace decgame {

/// Dense-tableau linear program: maximize objective subject to sparse
/// inequality rows a.x <= rhs and per-variable bounds. Structural variable
/// bounds must be finite; rows get implicit slack handling internally.
struct LinearProgram {
    int num_vars = 0;
    std::vector<double> objective;  // maximize
    std::vector<double> lower;
    std::vector<double> upper;

    struct Row {
        std::vector<std::pair<int, double>> coeffs;
        double rhs = 0.0;
    };
    std::vector<Row> rows;

    int add_variable(double lo, double hi, double obj);
    void add_row(std::vector<std::pair<int, double>> coeffs, double rhs);
};

struct LpResult {
    enum class Status { Optimal, Infeasible, IterationLimit } status = Status::Optimal;
    std::vector<double> x;
    double objective = 0.0;

    bool ok() const { return status == Status::Optimal; }
};

/// Two-phase primal simplex with bounded variables. Deterministic pivoting
/// (largest reduced cost, ties by index; Bland's rule after stalls).
LpResult solve_lp(const LinearProgram& lp);

/// Max violation of rows and bounds at x; used to enforce the subproblem
/// contract in tests.
double lp_violation(const LinearProgram& lp, const std::vector<double>& x);

}  // namespace decgame
