#pragma once

// Quadrature certification of the one-step identities behind the derivative
// representations: the push-forward derivative formula, the m-bar moment
// closed forms with the regulator-increment identity, the one-step
// integration-by-parts lemma, and the killed/reflected kernel symmetry.
// Uniform draws are always integrated out analytically (weights (1-p), p,
// 2p), so every check is a one-dimensional quadrature in the Gaussian
// innovation.

#include "ksd/model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ksd {

struct IdentityReport {
    std::string id;
    std::string model;
    double x = 0.0;
    double dt = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// d/dx E_x[F(X_1) m_1] = E_x[(F'(X_1) e_1 + F(X_1) h_1) m-bar_1], for C1
/// payoffs with F(L) = 0. Left side by Richardson-extrapolated differences
/// of the z-quadrature, right side by direct quadrature. Tolerance 1e-6.
/// At x = L both sides are right-derivative limits.
IdentityReport check_pushforward_one_step(const CoefficientModel& model,
                                          const TestFunction& payoff, double x,
                                          double dt);

/// E[Z^k m-bar] for k = 0,1,2 against 1, 2 sqrt(dt) theta, dt(1 - 4 u theta),
/// each via the two-integral reflected form, plus the regulator-increment
/// identity 2 E[(sigma Z + (x-L)) 1{U<=p} 1{X_1>L}] = dB. Tolerance 1e-10.
std::vector<IdentityReport> check_moments(const CoefficientModel& model, double x,
                                          double dt);

struct IbpFunctional {
    std::function<double(double, double)> G;   // G(x_prev, dW)
    std::function<double(double, double)> DG;  // d/d(dW) G
    std::string name;
};

IbpFunctional ibp_functional_one();
IbpFunctional ibp_functional_w();

/// E[G d/dx p_1] = -2 E[DG p d/dx((x-L)/sigma)] - 2 E[G p d/dx(b (x-L)/a)].
/// Tolerance 1e-8.
IdentityReport check_ibp(const CoefficientModel& model, const IbpFunctional& g,
                         double x, double dt);

/// Max over a 100 x 100 grid of |d/dx q^-(x,y) + d/dy q^+(x,y)| for the
/// driftless kernels (the identity consistent with
/// d/dx int f q^- = int f' q^+ for f(L) = 0). Tolerance 1e-10.
IdentityReport check_kernel_symmetry(double sigma, double T, double L);

/// The default acceptance grid: constant(beta=0.5) and tanh-drift models,
/// dt in {1e-2, 1e-3}, seven boundary-relative state points each, plus two
/// kernel-symmetry configurations.
std::vector<IdentityReport> default_identity_suite();

} // namespace ksd
