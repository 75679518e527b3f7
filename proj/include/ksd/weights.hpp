#pragma once

// Per-step weight factors of the discrete derivative representations and
// the streaming fold that turns a path into terminal weight functionals.
//
// Conventions: flags mark boundary crossings; u denotes the scaled distance
// (x_prev - L) / (sigma_prev sqrt(dt)); all multiplicative weights are
// accumulated in log space, the signed flow weights E and E-hat linearly.

#include "ksd/model.hpp"
#include "ksd/normal.hpp"
#include "ksd/path.hpp"

#include <cmath>

namespace ksd {

struct BoundaryConstants {
    double boaL = 0.0;     // (b/a)(L)
    double twoBoaL = 0.0;  // 2 (b/a)(L)

    static BoundaryConstants from_model(const CoefficientModel& m) {
        const DerivedCoeffs c = m.derived(m.boundary());
        return {c.boa, 2.0 * c.boa};
    }
};

struct WeightState {
    double E = 1.0;       // flow weight, signed
    double logK = 0.0;    // Girsanov weight
    double B = 0.0;       // accumulated regulator
    double logPsi = 0.0;  // discrete Psi-hat
    double Ehat = 1.0;    // BEL flow weight, signed
    double E_before_last_cross = 0.0;  // E snapshot at (last flag - 1); 0 when no flag
    int step = 0;

    double K() const { return std::exp(logK); }
    double Psi() const { return std::exp(logPsi); }
};

/// Predictable regulator increment of the driftless chain:
/// sigma * E[Z m-bar] = 2 sigma sqrt(dt) theta(u). Function of x_prev only.
inline double regulator_increment(double x_prev, double sigma_prev, double L, double dt) {
    const double sd = sigma_prev * std::sqrt(dt);
    return 2.0 * sd * theta((x_prev - L) / sd);
}

/// Flow factor in Z form: e = 1 + bbar dt 1{no flag} + sigma' z
///                            - sigma' 1{flag} (z + sqrt(dt) u).
inline double step_e(const DerivedCoeffs& c, double z, bool flag, double u, double dt) {
    double e = 1.0 + c.sigmap * z;
    if (flag)
        e -= c.sigmap * (z + std::sqrt(dt) * u);
    else
        e += c.bbar * dt;
    return e;
}

/// Girsanov log increment: (b/sigma) z - (b/sigma)^2 dt / 2.
inline double step_kappa(const DerivedCoeffs& c, double z, double dt) {
    const double r = c.b / c.sigma;
    return r * z - 0.5 * r * r * dt;
}

/// Drift-boundary factor: ((b/a) + (x_prev - L)(b/a)') 1{flag}.
inline double step_h(const DerivedCoeffs& c, double x_prev, double L, bool flag) {
    if (!flag) return 0.0;
    return c.boa + (x_prev - L) * c.boap;
}

/// log Psi-hat increment: (b' - sigma'^2/2) dt + sigma' dw + 2(b/a)(L) db.
inline double step_psi(const DerivedCoeffs& c, double dw, double db,
                       const BoundaryConstants& k, double dt) {
    return (c.bp - 0.5 * c.sigmap * c.sigmap) * dt + c.sigmap * dw + k.twoBoaL * db;
}

/// BEL flow factor: 1 + b' dt 1{no flag} + sigma' dw 1{no flag}
///                    + (b/a)(L) (x_next - L) 1{flag}.
inline double step_ehat(const DerivedCoeffs& c, double dw, bool flag, double x_next,
                        double L, const BoundaryConstants& k, double dt) {
    if (flag) return 1.0 + k.boaL * (x_next - L);
    return 1.0 + c.bp * dt + c.sigmap * dw;
}

/// Folds a full path into its terminal weight state. Engine 2 paths carry
/// only B and Psi-hat; E, K and E-hat stay at their initial values there.
WeightState fold_weights(const PathRecord& path, const CoefficientModel& model,
                         const BoundaryConstants& consts);

} // namespace ksd
