#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "decgame/lp.hpp"

using namespace decgame;

TEST_CASE("box objective without rows") {
    LinearProgram lp;
    int x = lp.add_variable(-1.0, 0.7, 1.0);
    int y = lp.add_variable(0.0, 2.0, -1.0);
    auto r = solve_lp(lp);
    REQUIRE(r.ok());
    CHECK(r.x[x] == doctest::Approx(0.7));
    CHECK(r.x[y] == doctest::Approx(0.0));
    CHECK(r.objective == doctest::Approx(0.7));
}

TEST_CASE("simple vertex optimum") {
    // max x + 2y st x + y <= 1, x,y in [0,1]
    LinearProgram lp;
    int x = lp.add_variable(0.0, 1.0, 1.0);
    int y = lp.add_variable(0.0, 1.0, 2.0);
    lp.add_row({{x, 1.0}, {y, 1.0}}, 1.0);
    auto r = solve_lp(lp);
    REQUIRE(r.ok());
    CHECK(r.objective == doctest::Approx(2.0));
    CHECK(r.x[y] == doctest::Approx(1.0));
    CHECK(r.x[x] == doctest::Approx(0.0));
}

TEST_CASE("negative shifted rhs needs phase 1") {
    // max -x st -x <= -2, x in [0, 5]: optimum x = 2
    LinearProgram lp;
    int x = lp.add_variable(0.0, 5.0, -1.0);
    lp.add_row({{x, -1.0}}, -2.0);
    auto r = solve_lp(lp);
    REQUIRE(r.ok());
    CHECK(r.x[x] == doctest::Approx(2.0));
}

TEST_CASE("infeasible detected") {
    LinearProgram lp;
    int x = lp.add_variable(0.0, 1.0, 1.0);
    lp.add_row({{x, 1.0}}, -0.5);  // x <= -0.5 impossible
    auto r = solve_lp(lp);
    CHECK(r.status == LpResult::Status::Infeasible);
}

TEST_CASE("equality via opposing rows") {
    // max y st y <= x, y >= x (i.e. y = x), x <= 0.25
    LinearProgram lp;
    int x = lp.add_variable(0.0, 1.0, 0.0);
    int y = lp.add_variable(0.0, 1.0, 1.0);
    lp.add_row({{y, 1.0}, {x, -1.0}}, 0.0);
    lp.add_row({{y, -1.0}, {x, 1.0}}, 0.0);
    lp.add_row({{x, 1.0}}, 0.25);
    auto r = solve_lp(lp);
    REQUIRE(r.ok());
    CHECK(r.objective == doctest::Approx(0.25));
}

TEST_CASE("degenerate ties stay finite") {
    LinearProgram lp;
    int x = lp.add_variable(0.0, 1.0, 1.0);
    int y = lp.add_variable(0.0, 1.0, 1.0);
    for (int i = 0; i < 6; ++i) lp.add_row({{x, 1.0}, {y, 1.0}}, 0.5);
    auto r = solve_lp(lp);
    REQUIRE(r.ok());
    CHECK(r.objective == doctest::Approx(0.5));
}

TEST_CASE("random LPs: feasible and undominated") {
    std::mt19937_64 gen(20240817);
    auto uniform = [&gen](double lo, double hi) {
        return lo + (hi - lo) * ((gen() >> 11) * 0x1.0p-53);
    };
    int solved = 0;
    for (int trial = 0; trial < 120; ++trial) {
        int nv = 2 + static_cast<int>(gen() % 5);
        int nr = 1 + static_cast<int>(gen() % 7);
        LinearProgram lp;
        for (int v = 0; v < nv; ++v) lp.add_variable(uniform(-2.0, 0.0), uniform(0.1, 3.0), uniform(-2.0, 2.0));
        // Rows anchored at an interior point so the LP is feasible.
        std::vector<double> anchor(nv);
        for (int v = 0; v < nv; ++v) anchor[v] = 0.5 * (lp.lower[v] + lp.upper[v]);
        for (int r = 0; r < nr; ++r) {
            std::vector<std::pair<int, double>> coeffs;
            double lhs = 0.0;
            for (int v = 0; v < nv; ++v) {
                if (gen() % 2 == 0) continue;
                double a = uniform(-2.0, 2.0);
                coeffs.emplace_back(v, a);
                lhs += a * anchor[v];
            }
            if (coeffs.empty()) continue;
            lp.add_row(std::move(coeffs), lhs + uniform(0.0, 1.5));
        }
        auto sol = solve_lp(lp);
        REQUIRE(sol.ok());
        ++solved;
        CHECK(lp_violation(lp, sol.x) < 1e-7);
        // No random feasible sample may beat the reported optimum.
        for (int probe = 0; probe < 200; ++probe) {
            std::vector<double> cand(nv);
            for (int v = 0; v < nv; ++v) cand[v] = uniform(lp.lower[v], lp.upper[v]);
            if (lp_violation(lp, cand) > 1e-9) continue;
            double obj = 0.0;
            for (int v = 0; v < nv; ++v) obj += lp.objective[v] * cand[v];
            CHECK(obj <= sol.objective + 1e-7);
        }
    }
    CHECK(solved == 120);
}
