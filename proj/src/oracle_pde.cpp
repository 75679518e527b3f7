#include "ksd/oracle_pde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ksd {

namespace {

// Thomas algorithm; diag/rhs are overwritten.
void solve_tridiag(std::vector<double>& sub, std::vector<double>& diag,
                   std::vector<double>& super, std::vector<double>& rhs,
                   std::vector<double>& out) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * super[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        out[i] = (rhs[i] - super[i] * out[i + 1]) / diag[i];
}

} // namespace

double PdeSolution::value_at(double x) const {
    const auto j = static_cast<std::size_t>(std::llround((x - L) / dx));
    return u.at(j);
}

PdeGrid make_pde_grid(const CoefficientModel& model, double x_eval, double T,
                      int nx_target, int nt, double theta) {
    const double L = model.boundary();
    const double span0 = (x_eval - L) + std::max(8.0 * model.sigma_max() * std::sqrt(T), 10.0);
    double dx = span0 / nx_target;
    if (x_eval > L) {
        const int m = std::max(1, static_cast<int>(std::llround((x_eval - L) / dx)));
        dx = (x_eval - L) / m;
    }
    const int nx = static_cast<int>(std::ceil(span0 / dx - 1e-9));
    return PdeGrid{L + nx * dx, nx, nt, theta};
}

PdeSolution solve_dirichlet(const CoefficientModel& model, const TestFunction& f,
                            double T, const PdeGrid& grid) {
    const double L = model.boundary();
    const int nx = grid.nx;
    const int nt = grid.nt;
    const double dx = (grid.R - L) / nx;
    const double dt = T / nt;
    const double th = grid.theta;
    if (th < 0.5 || th > 1.0) throw std::invalid_argument("pde: theta must be in [0.5, 1]");

    // operator stencil  A u = a/2 u_xx + b u_x  per node
    std::vector<double> lo(nx + 1, 0.0), di(nx + 1, 0.0), hi(nx + 1, 0.0);
    for (int j = 1; j < nx; ++j) {
        const double x = L + j * dx;
        const double a = model.sigma(x) * model.sigma(x);
        const double b = model.drift(x);
        if (std::fabs(b) * dx / a >= 2.0)
            throw std::invalid_argument("pde: cell Peclet number >= 2, refine dx");
        lo[j] = 0.5 * a / (dx * dx) - 0.5 * b / dx;
        hi[j] = 0.5 * a / (dx * dx) + 0.5 * b / dx;
        di[j] = -a / (dx * dx);
    }
    {   // right end: mirror closure u_{nx+1} = u_{nx-1}
        const double x = grid.R;
        const double a = model.sigma(x) * model.sigma(x);
        lo[nx] = a / (dx * dx);
        di[nx] = -a / (dx * dx);
    }

    std::vector<double> u(nx + 1), rhs(nx + 1), sub(nx + 1), diag(nx + 1), sup(nx + 1),
        next(nx + 1);
    for (int j = 0; j <= nx; ++j) u[j] = f.value(L + j * dx);
    u[0] = 0.0;

    for (int k = 0; k < nt; ++k) {
        rhs[0] = 0.0;
        for (int j = 1; j <= nx; ++j) {
            const double au = lo[j] * u[j - 1] + di[j] * u[j] + (j < nx ? hi[j] * u[j + 1] : 0.0);
            rhs[j] = u[j] + (1.0 - th) * dt * au;
        }
        sub[0] = 0.0;
        diag[0] = 1.0;
        sup[0] = 0.0;
        for (int j = 1; j <= nx; ++j) {
            sub[j] = -th * dt * lo[j];
            diag[j] = 1.0 - th * dt * di[j];
            sup[j] = j < nx ? -th * dt * hi[j] : 0.0;
        }
        solve_tridiag(sub, diag, sup, rhs, next);
        next[0] = 0.0;
        u.swap(next);
    }

    PdeSolution sol;
    sol.L = L;
    sol.dx = dx;
    sol.u = std::move(u);
    return sol;
}

double pde_deriv(const PdeSolution& sol, double x) {
    const int n = static_cast<int>(sol.u.size()) - 1;
    const int j = static_cast<int>(std::llround((x - sol.L) / sol.dx));
    if (j < 0 || j > n - 2)
        throw std::invalid_argument("pde_deriv: x outside [L, R - 2 dx]");
    const auto& u = sol.u;
    const double d = 12.0 * sol.dx;
    if (j >= 2 && j + 2 <= n)
        return (u[j - 2] - 8.0 * u[j - 1] + 8.0 * u[j + 1] - u[j + 2]) / d;
    if (j == 0)
        return (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / d;
    // j == 1, biased 5-point
    return (-3.0 * u[0] - 10.0 * u[1] + 18.0 * u[2] - 6.0 * u[3] + u[4]) / d;
}

namespace {

void check_domain(const CoefficientModel& model, double x_eval, double T, double R) {
    if (R < x_eval + 8.0 * model.sigma_max() * std::sqrt(T))
        throw std::invalid_argument("pde: right truncation R too small");
}

} // namespace

OracleResult pde_oracle_deriv(const CoefficientModel& model, const TestFunction& f,
                              double T, double x_eval, int nx_target, int nt,
                              double theta) {
    const PdeGrid coarse = make_pde_grid(model, x_eval, T, nx_target, nt, theta);
    check_domain(model, x_eval, T, coarse.R);
    const PdeGrid fine{coarse.R, 2 * coarse.nx, 2 * nt, theta};
    const double d1 = pde_deriv(solve_dirichlet(model, f, T, coarse), x_eval);
    const double d2 = pde_deriv(solve_dirichlet(model, f, T, fine), x_eval);
    OracleResult res;
    res.value = d2;
    res.tol = std::fabs(d2 - d1);
    res.converged = res.tol < 1e-5;
    return res;
}

OracleResult pde_oracle_value(const CoefficientModel& model, const TestFunction& f,
                              double T, double x_eval, int nx_target, int nt,
                              double theta) {
    const PdeGrid coarse = make_pde_grid(model, x_eval, T, nx_target, nt, theta);
    check_domain(model, x_eval, T, coarse.R);
    const PdeGrid fine{coarse.R, 2 * coarse.nx, 2 * nt, theta};
    const double v1 = solve_dirichlet(model, f, T, coarse).value_at(x_eval);
    const double v2 = solve_dirichlet(model, f, T, fine).value_at(x_eval);
    OracleResult res;
    res.value = v2;
    res.tol = std::fabs(v2 - v1);
    res.converged = res.tol < 1e-5;
    return res;
}

} // namespace ksd
