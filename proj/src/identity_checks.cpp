#include "ksd/identity_checks.hpp"

#include "ksd/normal.hpp"
#include "ksd/oracle_analytic.hpp"
#include "ksd/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace ksd {

namespace {

constexpr double kQuadTol = 1e-13;
constexpr double kZMax = 40.0;

// E_x[F(X_1) m_1] with the uniform integrated out:
// int_{X_1 > L} F(X_1) (1 - p(x, X_1)) phi(z) dz.
double killed_one_step(const CoefficientModel& model, const TestFunction& F,
                       double x, double dt) {
    const double L = model.boundary();
    const double b = model.drift(x);
    const double s = model.sigma(x);
    const double a = s * s;
    const double sd = s * std::sqrt(dt);
    const double zstar = (L - x - b * dt) / sd;
    if (zstar >= kZMax) return 0.0;
    auto integrand = [&](double z) {
        const double y = x + b * dt + sd * z;
        const double p = std::exp(std::max(-700.0, -2.0 * (x - L) * (y - L) / (a * dt)));
        return F.value(y) * (1.0 - p) * norm_pdf(z);
    };
    return integrate(integrand, std::max(zstar, -kZMax), kZMax, kQuadTol).value;
}

} // namespace

IdentityReport check_pushforward_one_step(const CoefficientModel& model,
                                          const TestFunction& payoff, double x,
                                          double dt) {
    IdentityReport rep;
    rep.id = "pushforward";
    rep.model = model.name();
    rep.x = x;
    rep.dt = dt;
    rep.tol = 1e-6;
    const double L = model.boundary();

    const double h = 1e-4 * std::max(1.0, x - L);
    auto V = [&](double xx) { return killed_one_step(model, payoff, xx, dt); };
    auto slope = [&](double step) {
        if (x - step >= L) return (V(x + step) - V(x - step)) / (2.0 * step);
        return (-3.0 * V(x) + 4.0 * V(x + step) - V(x + 2.0 * step)) / (2.0 * step);
    };
    const double d1 = slope(h);
    const double d2 = slope(0.5 * h);
    rep.lhs = (4.0 * d2 - d1) / 3.0;

    // RHS: crossing branch weighted 2p inside m-bar, the other (1-p).
    const DerivedCoeffs c = model.derived(x);
    const double sd = c.sigma * std::sqrt(dt);
    const double zstar = (L - x - c.b * dt) / sd;
    const double e_cross = 1.0 - c.sigmap * (x - L) / c.sigma;
    const double h_cross = c.boa + (x - L) * c.boap;
    auto integrand = [&](double z) {
        const double y = x + c.b * dt + sd * z;
        const double p = std::exp(std::max(-700.0, -2.0 * (x - L) * (y - L) / (c.a * dt)));
        const double e_plain = 1.0 + c.bp * dt + c.sigmap * std::sqrt(dt) * z;
        const double branch_plain = (1.0 - p) * payoff.deriv(y) * e_plain;
        const double branch_cross = 2.0 * p * (payoff.deriv(y) * e_cross + payoff.value(y) * h_cross);
        return (branch_plain + branch_cross) * norm_pdf(z);
    };
    rep.rhs = integrate(integrand, std::max(zstar, -kZMax), kZMax, kQuadTol).value;
    rep.residual = std::fabs(rep.lhs - rep.rhs);
    rep.pass = rep.residual <= rep.tol;
    return rep;
}

std::vector<IdentityReport> check_moments(const CoefficientModel& model, double x,
                                          double dt) {
    std::vector<IdentityReport> out;
    const double L = model.boundary();
    const double s = model.sigma(x);
    const double sd = s * std::sqrt(dt);
    const double u = (x - L) / sd;

    // two-integral reflected form of E[Z^k m-bar]
    auto lhs_moment = [&](int k) {
        auto f1 = [&](double t) { return std::pow(t, k) * norm_pdf(t); };
        auto f2 = [&](double t) { return std::pow(t - 2.0 * u, k) * norm_pdf(t); };
        const double i1 = integrate(f1, -u, kZMax, kQuadTol).value;
        const double i2 = integrate(f2, u, kZMax, kQuadTol).value;
        return std::pow(dt, 0.5 * k) * (i1 + i2);
    };
    const double th = theta(u);
    const double rhs[3] = {1.0, 2.0 * std::sqrt(dt) * th, dt * (1.0 - 4.0 * u * th)};
    for (int k = 0; k <= 2; ++k) {
        IdentityReport rep;
        rep.id = "moment_k" + std::to_string(k);
        rep.model = model.name();
        rep.x = x;
        rep.dt = dt;
        rep.tol = 1e-10;
        rep.lhs = lhs_moment(k);
        rep.rhs = rhs[k];
        rep.residual = std::fabs(rep.lhs - rep.rhs);
        rep.pass = rep.residual <= rep.tol;
        out.push_back(rep);
    }

    // regulator increment: 2 E[(sigma Z + (x-L)) 1{U<=p} 1{X_1>L}] = dB
    {
        IdentityReport rep;
        rep.id = "regulator_increment";
        rep.model = model.name();
        rep.x = x;
        rep.dt = dt;
        rep.tol = 1e-10;
        auto integrand = [&](double z) {
            const double y = x + sd * z;  // driftless chain
            if (y <= L) return 0.0;
            const double p = std::exp(std::max(-700.0, -2.0 * (x - L) * (y - L) / (s * s * dt)));
            return 2.0 * (sd * z + (x - L)) * p * norm_pdf(z);
        };
        rep.lhs = integrate(integrand, std::max(-u, -kZMax), kZMax, kQuadTol).value;
        rep.rhs = 2.0 * sd * th;
        rep.residual = std::fabs(rep.lhs - rep.rhs);
        rep.pass = rep.residual <= rep.tol;
        out.push_back(rep);
    }
    return out;
}

IbpFunctional ibp_functional_one() {
    return {[](double, double) { return 1.0; }, [](double, double) { return 0.0; }, "G=1"};
}

IbpFunctional ibp_functional_w() {
    return {[](double, double w) { return w; }, [](double, double) { return 1.0; }, "G=w"};
}

IdentityReport check_ibp(const CoefficientModel& model, const IbpFunctional& g,
                         double x, double dt) {
    IdentityReport rep;
    rep.id = "ibp_" + g.name;
    rep.model = model.name();
    rep.x = x;
    rep.dt = dt;
    rep.tol = 1e-8;
    const double L = model.boundary();
    const DerivedCoeffs c = model.derived(x);
    const double sd = c.sigma * std::sqrt(dt);
    const double u = (x - L) / sd;
    const double lo = -(2.0 * std::max(u, 0.0) + kZMax);

    // p as the exponential formula; p * phi keeps a Gaussian envelope
    auto p_formula = [&](double y) {
        return std::exp(std::min(700.0, -2.0 * (x - L) * (y - L) / (c.a * dt)));
    };
    const double dXdx_det = 1.0 + c.bp * dt;  // plus sigma' dW per draw
    auto lhs_f = [&](double z) {
        const double dw = std::sqrt(dt) * z;
        const double y = x + c.b * dt + c.sigma * dw;
        const double p = p_formula(y);
        const double dXdx = dXdx_det + c.sigmap * dw;
        const double dEdx = -2.0 * ((y - L) + (x - L) * dXdx) / (c.a * dt) +
                            2.0 * (x - L) * (y - L) * c.ap / (c.a * c.a * dt);
        return g.G(x, dw) * p * dEdx * norm_pdf(z);
    };
    rep.lhs = integrate(lhs_f, lo, kZMax, kQuadTol).value;

    const double d_sig = 1.0 / c.sigma - (x - L) * c.sigmap / c.a;
    const double d_drift =
        (c.bp * (x - L) + c.b) / c.a - c.b * (x - L) * c.ap / (c.a * c.a);
    auto rhs_f = [&](double z) {
        const double dw = std::sqrt(dt) * z;
        const double y = x + c.b * dt + c.sigma * dw;
        const double p = p_formula(y);
        return (-2.0 * g.DG(x, dw) * d_sig - 2.0 * g.G(x, dw) * d_drift) * p * norm_pdf(z);
    };
    rep.rhs = integrate(rhs_f, lo, kZMax, kQuadTol).value;
    rep.residual = std::fabs(rep.lhs - rep.rhs);
    rep.pass = rep.residual <= rep.tol;
    return rep;
}

IdentityReport check_kernel_symmetry(double sigma, double T, double L) {
    IdentityReport rep;
    rep.id = "kernel_symmetry";
    rep.model = "constant";
    rep.x = L;
    rep.dt = T;
    rep.tol = 1e-10;
    const GaussKernelParams params{0.0, sigma, L, T};
    double worst = 0.0;
    const double span = 5.0 * sigma;
    for (int i = 0; i < 100; ++i) {
        for (int j = 0; j < 100; ++j) {
            const double x = L + span * (i + 0.5) / 100.0;
            const double y = L + span * (j + 0.5) / 100.0;
            const double r = killed_kernel_dx(x, y, params) + reflected_kernel_dy(x, y, params);
            worst = std::max(worst, std::fabs(r));
        }
    }
    rep.lhs = worst;
    rep.rhs = 0.0;
    rep.residual = worst;
    rep.pass = rep.residual <= rep.tol;
    return rep;
}

std::vector<IdentityReport> default_identity_suite() {
    std::vector<IdentityReport> out;
    const double L = 0.0;
    const CoefficientModel models[2] = {
        CoefficientModel::make("constant", {{"beta", 0.5}, {"sigma", 1.0}}, L),
        CoefficientModel::make("tanh-drift", {}, L)};
    const TestFunction payoff = TestFunction::make("expm", {}, L);
    const double dts[2] = {1e-2, 1e-3};
    const double scaled_offsets[6] = {0.0, 0.1, 0.5, 1.0, 3.0, 10.0};

    for (const auto& model : models) {
        for (double dt : dts) {
            const double sd0 = model.sigma(L) * std::sqrt(dt);
            std::vector<double> points;
            for (double s : scaled_offsets) points.push_back(L + s * sd0);
            points.push_back(L + 1.0);
            for (double x : points) {
                out.push_back(check_pushforward_one_step(model, payoff, x, dt));
                auto mom = check_moments(model, x, dt);
                out.insert(out.end(), mom.begin(), mom.end());
                out.push_back(check_ibp(model, ibp_functional_one(), x, dt));
                out.push_back(check_ibp(model, ibp_functional_w(), x, dt));
            }
        }
    }
    out.push_back(check_kernel_symmetry(1.0, 1.0, L));
    out.push_back(check_kernel_symmetry(2.0, 1.0, L));
    return out;
}

} // namespace ksd
