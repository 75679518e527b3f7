#include "ksd/oracle_pde.hpp"

#include "ksd/oracle_analytic.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>

using namespace ksd;

namespace {

PdeSolution make_profile(double L, double dx, int n, double (*f)(double)) {
    PdeSolution s;
    s.L = L;
    s.dx = dx;
    s.u.resize(n + 1);
    for (int j = 0; j <= n; ++j) s.u[j] = f(L + j * dx);
    return s;
}

double linear(double x) { return 3.25 * x; }
double smooth(double x) { return std::sin(1.3 * x); }

} // namespace

TEST_CASE("pde_deriv: polynomial exactness and Richardson order") {
    const auto lin = make_profile(0.0, 0.01, 400, linear);
    CHECK(pde_deriv(lin, 0.0) == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(pde_deriv(lin, 1.0) == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(pde_deriv(lin, 0.01) == doctest::Approx(3.25).epsilon(1e-12));

    // halving dx shrinks the error by about 16x on smooth profiles
    const auto coarse = make_profile(0.0, 0.02, 200, smooth);
    const auto fine = make_profile(0.0, 0.01, 400, smooth);
    const double exact = 1.3 * std::cos(1.3 * 2.0);
    const double e1 = std::fabs(pde_deriv(coarse, 2.0) - exact);
    const double e2 = std::fabs(pde_deriv(fine, 2.0) - exact);
    CHECK(e1 / e2 > 10.0);
    CHECK(e1 / e2 < 24.0);

    CHECK_THROWS_AS(pde_deriv(lin, 4.0), std::invalid_argument);  // beyond R - 2dx
}

TEST_CASE("solver: zero payoff stays zero, boundary pinned, mass bounded") {
    const auto model = CoefficientModel::make("tanh-drift", {}, 0.0);
    // indicator far beyond the truncation acts as f = 0 on the grid
    const auto zero = TestFunction::make("indicator", {{"level", 1e9}}, 0.0);
    const PdeGrid grid = make_pde_grid(model, 0.5, 1.0, 400, 200);
    const PdeSolution s = solve_dirichlet(model, zero, 1.0, grid);
    for (double v : s.u) CHECK(v == 0.0);

    const auto payoff = TestFunction::make("expm", {}, 0.0);
    const PdeSolution s2 = solve_dirichlet(model, payoff, 1.0, grid);
    CHECK(s2.u.front() == 0.0);
    for (double v : s2.u) CHECK(std::fabs(v) <= 1.0 + 1e-12);
}

TEST_CASE("positivity: implicit Euler exactly, CN with small steps") {
    const auto model = CoefficientModel::make("constant", {{"beta", 0.5}}, 0.0);
    const auto payoff = TestFunction::make("expm", {}, 0.0);
    PdeGrid grid = make_pde_grid(model, 0.5, 1.0, 500, 400, 1.0);
    for (double v : solve_dirichlet(model, payoff, 1.0, grid).u) CHECK(v >= 0.0);
    grid.theta = 0.5;
    for (double v : solve_dirichlet(model, payoff, 1.0, grid).u) CHECK(v >= -1e-12);
}

TEST_CASE("Brownian case matches the analytic oracle") {
    const auto model = CoefficientModel::make("constant", {{"beta", 0.0}, {"sigma", 1.0}}, 0.0);
    const auto payoff = TestFunction::make("expm", {}, 0.0);
    const GaussKernelParams p{0.0, 1.0, 0.0, 1.0};

    const PdeGrid grid = make_pde_grid(model, 0.5, 1.0, 4000, 4000);
    const PdeSolution s = solve_dirichlet(model, payoff, 1.0, grid);
    const double ref = oracle_value(payoff, 0.5, p).value;
    CHECK(std::fabs(s.value_at(0.5) - ref) <= 1e-6);

    const double dref = oracle_deriv(payoff, 0.5, p).value;
    CHECK(std::fabs(pde_deriv(s, 0.5) - dref) <= 1e-5);
}

TEST_CASE("self-convergence order across three refinements") {
    const auto model = CoefficientModel::make("tanh-drift", {}, 0.0);
    const auto payoff = TestFunction::make("expm", {}, 0.0);
    const double x = 0.5, T = 1.0;
    double v[3];
    for (int k = 0; k < 3; ++k) {
        const PdeGrid g = make_pde_grid(model, x, T, 250 << k, 125 << k);
        v[k] = solve_dirichlet(model, payoff, T, g).value_at(x);
    }
    const double e1 = std::fabs(v[0] - v[1]);
    const double e2 = std::fabs(v[1] - v[2]);
    CHECK(std::log2(e1 / e2) >= 1.8);
}

TEST_CASE("configuration errors and grid construction") {
    const auto model = CoefficientModel::make("constant", {}, 0.0);
    const auto payoff = TestFunction::make("expm", {}, 0.0);
    CHECK_THROWS_AS(solve_dirichlet(model, payoff, 1.0, PdeGrid{12.0, 200, 100, 0.3}),
                    std::invalid_argument);  // theta out of range

    // grids always honor the truncation invariant and hit x_eval on a node
    for (double x : {0.0, 0.5, 3.3}) {
        const PdeGrid g = make_pde_grid(model, x, 1.0, 777, 100);
        CHECK(g.R >= x + std::max(8.0 * model.sigma_max(), 10.0) - 1e-9);
        const double dx = (g.R - 0.0) / g.nx;
        const double frac = (x - 0.0) / dx;
        CHECK(std::fabs(frac - std::llround(frac)) < 1e-9);
    }

    // drift-dominated cells are rejected (cell Peclet >= 2)
    const auto thin = CoefficientModel::make("constant", {{"beta", 0.5}, {"sigma", 0.3}}, 0.0);
    CHECK_THROWS_AS(solve_dirichlet(thin, payoff, 1.0, PdeGrid{12.0, 8, 10, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("refined oracle reports its own gap") {
    const auto model = CoefficientModel::make("tanh-drift", {}, 0.0);
    const auto payoff = TestFunction::make("expm", {}, 0.0);
    const OracleResult r = pde_oracle_deriv(model, payoff, 1.0, 0.5, 1500, 750);
    CHECK(r.converged);
    CHECK(r.tol < 1e-5);
}
