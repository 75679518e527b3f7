#pragma once

// Independent reference for general bounded coefficients: theta-scheme
// solver for u_t = a(x)/2 u_xx + b(x) u_x on (L, R), absorbing boundary at
// L, zero-Neumann closure at the truncated right end, and 4th-order
// derivative extraction on the uniform grid.

#include "ksd/model.hpp"
#include "ksd/oracle_analytic.hpp"

#include <vector>

namespace ksd {

struct PdeGrid {
    double R;             // right truncation
    int nx;               // spatial cells (nodes 0..nx)
    int nt;               // time steps
    double theta = 0.5;   // 0.5 Crank-Nicolson, 1.0 implicit Euler
};

struct PdeSolution {
    double L = 0.0;
    double dx = 0.0;
    std::vector<double> u;  // profile at t = T on nodes L + j dx

    double value_at(double x) const;  // nearest-node lookup
};

/// Builds a grid whose node set contains x_eval, with
/// R >= x_eval + max(8 sigma_max sqrt(T), 10).
PdeGrid make_pde_grid(const CoefficientModel& model, double x_eval, double T,
                      int nx_target, int nt, double theta = 0.5);

/// Throws std::invalid_argument when R is too small for (x_eval, T) or the
/// cell Peclet number reaches 2.
PdeSolution solve_dirichlet(const CoefficientModel& model, const TestFunction& f,
                            double T, const PdeGrid& grid);

/// 4th-order one-sided/central first derivative at x (a grid node).
double pde_deriv(const PdeSolution& sol, double x);

/// Derivative reference with a built-in (nx,nt) vs (2nx,2nt) refinement;
/// tol reports the self-convergence gap, converged means gap < 1e-5.
OracleResult pde_oracle_deriv(const CoefficientModel& model, const TestFunction& f,
                              double T, double x_eval, int nx_target, int nt,
                              double theta = 0.5);

/// Matching value reference at x_eval from the same solver.
OracleResult pde_oracle_value(const CoefficientModel& model, const TestFunction& f,
                              double T, double x_eval, int nx_target, int nt,
                              double theta = 0.5);

} // namespace ksd
