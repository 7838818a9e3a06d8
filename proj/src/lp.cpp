#include "decgame/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace decgame {

namespace {
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr long kMaxPivots = 50000;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

int LinearProgram::add_variable(double lo, double hi, double obj) {
    lower.push_back(lo);
    upper.push_back(hi);
    objective.push_back(obj);
    return num_vars++;
}

void LinearProgram::add_row(std::vector<std::pair<int, double>> coeffs, double rhs) {
    rows.push_back(Row{std::move(coeffs), rhs});
}

double lp_violation(const LinearProgram& lp, const std::vector<double>& x) {
    double worst = 0.0;
    for (int j = 0; j < lp.num_vars; ++j) {
        worst = std::max(worst, lp.lower[j] - x[j]);
        worst = std::max(worst, x[j] - lp.upper[j]);
    }
    for (const auto& row : lp.rows) {
        double lhs = 0.0;
        for (const auto& [j, a] : row.coeffs) lhs += a * x[j];
        worst = std::max(worst, lhs - row.rhs);
    }
    return worst;
}

namespace {

/// Tableau state for the bounded-variable simplex. Variables are shifted so
/// structural columns live in [0, span]; slack and artificial columns are
/// [0, inf). basic value of row i is kept in rhs[i].
struct Tableau {
    int m = 0;            // rows
    int cols = 0;         // total columns
    int first_artificial = 0;
    std::vector<std::vector<double>> a;  // m x cols
    std::vector<double> rhs;             // basic values
    std::vector<double> span;            // upper bound of shifted column
    std::vector<int> basis;              // column basic in each row
    enum class At { Lower, Upper, Basic };
    std::vector<At> status;

    double nonbasic_value(int j) const { return status[j] == At::Upper ? span[j] : 0.0; }
};

/// One simplex run for a fixed objective c over tableau columns. Returns
/// true when an optimum was reached within the pivot budget.
bool run_simplex(Tableau& t, const std::vector<double>& c, bool allow_artificial_entering) {
    const int m = t.m;
    const int cols = t.cols;

    // Reduced costs d_j = c_j - c_B B^-1 A_j; the tableau already stores
    // B^-1 A, so this is a direct accumulation.
    std::vector<double> d(cols);
    for (int j = 0; j < cols; ++j) {
        double v = c[j];
        for (int i = 0; i < m; ++i) {
            double cb = c[t.basis[i]];
            if (cb != 0.0) v -= cb * t.a[i][j];
        }
        d[j] = v;
    }

    long stall = 0;
    bool bland = false;
    double last_obj = -kInf;
    for (long pivots = 0; pivots < kMaxPivots; ++pivots) {
        // Entering column: improving reduced cost given the bound side.
        int enter = -1;
        double best_score = kCostTol;
        for (int j = 0; j < cols; ++j) {
            if (t.status[j] == Tableau::At::Basic) continue;
            if (!allow_artificial_entering && j >= t.first_artificial) continue;
            double score = 0.0;
            if (t.status[j] == Tableau::At::Lower && d[j] > kCostTol) score = d[j];
            if (t.status[j] == Tableau::At::Upper && d[j] < -kCostTol) score = -d[j];
            if (score <= 0.0) continue;
            if (bland) {
                enter = j;
                break;
            }
            if (score > best_score) {
                best_score = score;
                enter = j;
            }
        }
        if (enter < 0) return true;  // optimal

        const bool from_lower = t.status[enter] == Tableau::At::Lower;
        // Moving the entering variable by step >= 0 changes basics by -dir*step.
        std::vector<double> dir(m);
        for (int i = 0; i < m; ++i) dir[i] = from_lower ? t.a[i][enter] : -t.a[i][enter];

        double limit = t.span[enter];  // bound flip distance
        int leave_row = -1;
        bool leave_at_upper = false;
        for (int i = 0; i < m; ++i) {
            double step;
            bool hits_upper;
            if (dir[i] > kPivotTol) {
                step = t.rhs[i] / dir[i];  // basic falls to 0
                hits_upper = false;
            } else if (dir[i] < -kPivotTol && t.span[t.basis[i]] < kInf) {
                step = (t.span[t.basis[i]] - t.rhs[i]) / (-dir[i]);  // basic hits upper
                hits_upper = true;
            } else {
                continue;
            }
            if (step < 0.0) step = 0.0;
            double tie = 1e-10 * (1.0 + std::min(std::abs(limit), std::abs(step)));
            if (step < limit - tie) {
                limit = step;
                leave_row = i;
                leave_at_upper = hits_upper;
            } else if (step < limit + tie && leave_row >= 0 && t.basis[i] < t.basis[leave_row]) {
                leave_row = i;  // tie: smallest basis index for determinism
                leave_at_upper = hits_upper;
            }
        }
        if (limit >= kInf) return false;  // unbounded direction (callers treat as error)

        if (leave_row < 0) {
            // Pure bound flip of the entering variable.
            for (int i = 0; i < m; ++i) t.rhs[i] -= dir[i] * limit;
            t.status[enter] =
                from_lower ? Tableau::At::Upper : Tableau::At::Lower;
        } else {
            // Pivot: entering becomes basic in leave_row.
            int leave = t.basis[leave_row];
            for (int i = 0; i < m; ++i) t.rhs[i] -= dir[i] * limit;
            double entering_value = from_lower ? limit : t.span[enter] - limit;
            double piv = t.a[leave_row][enter];
            auto& prow = t.a[leave_row];
            double inv = 1.0 / piv;
            for (int j = 0; j < cols; ++j) prow[j] *= inv;
            for (int i = 0; i < m; ++i) {
                if (i == leave_row) continue;
                double f = t.a[i][enter];
                if (f == 0.0) continue;
                auto& row = t.a[i];
                for (int j = 0; j < cols; ++j) row[j] -= f * prow[j];
            }
            double fd = d[enter];
            if (fd != 0.0)
                for (int j = 0; j < cols; ++j) d[j] -= fd * prow[j];
            t.basis[leave_row] = enter;
            t.status[enter] = Tableau::At::Basic;
            t.status[leave] = leave_at_upper ? Tableau::At::Upper : Tableau::At::Lower;
            t.rhs[leave_row] = entering_value;
        }

        // Anti-cycling: objective progress watchdog.
        double obj = 0.0;
        for (int i = 0; i < m; ++i) obj += c[t.basis[i]] * t.rhs[i];
        for (int j = 0; j < cols; ++j)
            if (t.status[j] == Tableau::At::Upper) obj += c[j] * t.span[j];
        if (obj > last_obj + 1e-12) {
            last_obj = obj;
            stall = 0;
            bland = false;
        } else if (++stall > 100) {
            bland = true;
        }
    }
    return false;
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
    const int n = lp.num_vars;
    const int m = static_cast<int>(lp.rows.size());

    // Shift structural variables to [0, span]; rows become a.y <= b'.
    std::vector<double> shifted_rhs(m);
    for (int i = 0; i < m; ++i) {
        double b = lp.rows[i].rhs;
        for (const auto& [j, a] : lp.rows[i].coeffs) b -= a * lp.lower[j];
        shifted_rhs[i] = b;
    }

    Tableau t;
    t.m = m;
    // Columns: structural | row slacks | artificials (only for negative rhs rows).
    int num_art = 0;
    for (int i = 0; i < m; ++i)
        if (shifted_rhs[i] < 0.0) ++num_art;
    t.first_artificial = n + m;
    t.cols = n + m + num_art;
    t.a.assign(m, std::vector<double>(t.cols, 0.0));
    t.rhs.assign(m, 0.0);
    t.span.assign(t.cols, kInf);
    t.status.assign(t.cols, Tableau::At::Lower);
    t.basis.assign(m, -1);
    for (int j = 0; j < n; ++j) {
        double span = lp.upper[j] - lp.lower[j];
        if (!(span >= 0.0) || !std::isfinite(span))
            throw DomainError("solve_lp: structural variables need finite ordered bounds");
        t.span[j] = span;
    }

    int art = 0;
    for (int i = 0; i < m; ++i) {
        double sign = shifted_rhs[i] < 0.0 ? -1.0 : 1.0;
        for (const auto& [j, a] : lp.rows[i].coeffs) t.a[i][j] += sign * a;
        t.a[i][n + i] = sign;  // slack
        if (sign < 0.0) {
            int col = n + m + art++;
            t.a[i][col] = 1.0;
            t.basis[i] = col;
            t.status[col] = Tableau::At::Basic;
        } else {
            t.basis[i] = n + i;
            t.status[n + i] = Tableau::At::Basic;
        }
        t.rhs[i] = std::abs(shifted_rhs[i]);
    }

    LpResult result;
    if (num_art > 0) {
        std::vector<double> phase1(t.cols, 0.0);
        for (int j = t.first_artificial; j < t.cols; ++j) phase1[j] = -1.0;
        if (!run_simplex(t, phase1, /*allow_artificial_entering=*/true)) {
            result.status = LpResult::Status::IterationLimit;
            return result;
        }
        double infeas = 0.0;
        for (int i = 0; i < m; ++i)
            if (t.basis[i] >= t.first_artificial) infeas += t.rhs[i];
        if (infeas > kFeasTol) {
            result.status = LpResult::Status::Infeasible;
            return result;
        }
        // Freeze artificials so they cannot drift back to positive values.
        for (int j = t.first_artificial; j < t.cols; ++j) t.span[j] = 0.0;
    }

    std::vector<double> phase2(t.cols, 0.0);
    for (int j = 0; j < n; ++j) phase2[j] = lp.objective[j];
    if (!run_simplex(t, phase2, /*allow_artificial_entering=*/false)) {
        result.status = LpResult::Status::IterationLimit;
        return result;
    }

    result.x.assign(n, 0.0);
    for (int j = 0; j < n; ++j) result.x[j] = lp.lower[j] + t.nonbasic_value(j);
    for (int i = 0; i < m; ++i)
        if (t.basis[i] < n) result.x[t.basis[i]] = lp.lower[t.basis[i]] + t.rhs[i];
    result.objective = 0.0;
    for (int j = 0; j < n; ++j) result.objective += lp.objective[j] * result.x[j];
    result.status = LpResult::Status::Optimal;
    return result;
}

}  // namespace decgame
