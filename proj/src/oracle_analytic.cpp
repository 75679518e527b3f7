#include "ksd/oracle_analytic.hpp"

#include "ksd/normal.hpp"
#include "ksd/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace ksd {

namespace {

constexpr double kQuadTol = 1e-10;

inline double gauss_density(double z, double var) {
    return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * M_PI * var);
}

double cutoff(double x, const GaussKernelParams& p) {
    return x + p.mu * p.T + 12.0 * p.sigma * std::sqrt(p.T);
}

OracleResult integrate_split(const std::function<double(double)>& g, double lo,
                             double hi, const std::vector<double>& breakpoints) {
    std::vector<double> cuts{lo, hi};
    for (double b : breakpoints)
        if (b > lo && b < hi) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    OracleResult res;
    res.tol = kQuadTol;
    res.converged = true;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const QuadResult q = integrate(g, cuts[i], cuts[i + 1], kQuadTol);
        res.value += q.value;
        res.converged = res.converged && q.converged;
    }
    return res;
}

} // namespace

double killed_kernel(double x, double y, const GaussKernelParams& p) {
    const double var = p.sigma * p.sigma * p.T;
    const double direct = gauss_density(y - x - p.mu * p.T, var);
    const double image = gauss_density(y + x - 2.0 * p.L - p.mu * p.T, var);
    const double w = std::exp(-2.0 * p.mu * (x - p.L) / (p.sigma * p.sigma));
    return direct - w * image;
}

double killed_kernel_dx(double x, double y, const GaussKernelParams& p) {
    const double var = p.sigma * p.sigma * p.T;
    const double a = p.sigma * p.sigma;
    const double z1 = y - x - p.mu * p.T;
    const double z2 = y + x - 2.0 * p.L - p.mu * p.T;
    const double g1 = gauss_density(z1, var);
    const double g2 = gauss_density(z2, var);
    const double w = std::exp(-2.0 * p.mu * (x - p.L) / a);
    return g1 * z1 / var + w * g2 * (2.0 * p.mu / a + z2 / var);
}

double reflected_kernel(double x, double y, const GaussKernelParams& p) {
    const double var = p.sigma * p.sigma * p.T;
    return gauss_density(y - x, var) + gauss_density(y + x - 2.0 * p.L, var);
}

double reflected_kernel_dy(double x, double y, const GaussKernelParams& p) {
    const double var = p.sigma * p.sigma * p.T;
    const double z1 = y - x;
    const double z2 = y + x - 2.0 * p.L;
    return -(z1 * gauss_density(z1, var) + z2 * gauss_density(z2, var)) / var;
}

double bridge_crossing_prob_cont(double x, double y, const GaussKernelParams& p) {
    const double d0 = x - p.L;
    const double d1 = y - p.L;
    if (d0 <= 0.0 || d1 <= 0.0) return 1.0;
    const double expo = -2.0 * d0 * d1 / (p.sigma * p.sigma * p.T);
    if (expo < -700.0) return 0.0;
    return std::exp(expo);
}

double survival_prob(double x, const GaussKernelParams& p) {
    // integral over (L, inf) of the killed kernel
    const double sd = p.sigma * std::sqrt(p.T);
    const double z1 = (p.L - x - p.mu * p.T) / sd;
    const double z2 = (p.L + x - 2.0 * p.L - p.mu * p.T) / sd;  // (x - L - mu T)/sd
    const double w = std::exp(-2.0 * p.mu * (x - p.L) / (p.sigma * p.sigma));
    return norm_sf(z1) - w * norm_sf(z2);
}

OracleResult oracle_value(const std::function<double(double)>& f, double x,
                          const GaussKernelParams& p,
                          const std::vector<double>& breakpoints) {
    auto g = [&](double y) { return f(y) * killed_kernel(x, y, p); };
    return integrate_split(g, p.L, cutoff(x, p), breakpoints);
}

OracleResult oracle_deriv(const std::function<double(double)>& f, double x,
                          const GaussKernelParams& p,
                          const std::vector<double>& breakpoints,
                          const std::function<double(double)>& fprime) {
    auto g = [&](double y) { return f(y) * killed_kernel_dx(x, y, p); };
    OracleResult res = integrate_split(g, p.L, cutoff(x, p), breakpoints);
    if (p.mu == 0.0 && fprime) {
        auto g2 = [&](double y) { return fprime(y) * reflected_kernel(x, y, p); };
        const OracleResult alt = integrate_split(g2, p.L, cutoff(x, p), breakpoints);
        if (std::fabs(alt.value - res.value) > 1e-9) res.converged = false;
    }
    return res;
}

OracleResult oracle_value(const TestFunction& f, double x, const GaussKernelParams& p) {
    return oracle_value([&](double y) { return f.value(y); }, x, p, f.breakpoints());
}

OracleResult oracle_deriv(const TestFunction& f, double x, const GaussKernelParams& p) {
    std::function<double(double)> fp;
    if (f.has_deriv()) fp = [&f](double y) { return f.deriv(y); };
    return oracle_deriv([&](double y) { return f.value(y); }, x, p, f.breakpoints(), fp);
}

} // namespace ksd
