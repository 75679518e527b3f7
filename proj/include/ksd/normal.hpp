#pragma once

// Standard normal density, tail function and the boundary kernel
// theta(u) = phi(u) - u*Phibar(u) used by the regulator increments.

#include <cmath>
#include <limits>

namespace ksd {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
inline constexpr double kSqrt2Pi = 2.5066282746310005024157653;

inline double norm_pdf(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

/// P(N <= u).
inline double norm_cdf(double u) { return 0.5 * std::erfc(-u / M_SQRT2); }

/// P(N > u). erfc keeps full relative accuracy until it underflows near u ~ 37.5.
inline double norm_sf(double u) { return 0.5 * std::erfc(u / M_SQRT2); }

namespace detail {

// Alternating asymptotic tail series theta(u)/phi(u) = u^-2 - 3u^-4 + 15u^-6
// - ...; terms t_{k+1} = t_k (2k+1)/u^2. Summed until they stop shrinking or
// fall below round-off; for u >= 12 the truncation sits under 1e-14 relative.
inline double theta_tail_factor(double u) {
    const double r = 1.0 / (u * u);
    double t = r, sum = 0.0, sign = 1.0;
    for (int k = 1; k <= 80; ++k) {
        sum += sign * t;
        const double tn = t * (2.0 * k + 1.0) * r;
        if (tn >= t || tn < 1e-18 * sum) break;
        t = tn;
        sign = -sign;
    }
    return sum;
}

} // namespace detail

/// theta(u) = phi(u) - u*Phibar(u), u >= 0. Decreasing, 0 < theta <= phi(0),
/// equals E[(N - u)^+] for a standard normal N. Direct evaluation below the
/// seam, tail series beyond it (the difference cancels as u^-2).
inline double theta(double u) {
    if (u < 0.0) u = 0.0;
    if (u < 12.0) return norm_pdf(u) - u * norm_sf(u);
    return norm_pdf(u) * detail::theta_tail_factor(u);
}

/// log Phibar(u), usable far beyond the erfc underflow point.
inline double log_norm_sf(double u) {
    if (u < 30.0) return std::log(norm_sf(u));
    // Phibar(u) = phi(u)/u (1 - u^-2 + 3u^-4 - ...)
    const double r = 1.0 / (u * u);
    double t = r, sum = 1.0, sign = -1.0;
    for (int k = 1; k <= 80; ++k) {
        sum += sign * t;
        const double tn = t * (2.0 * k + 1.0) * r;
        if (tn >= t || tn < 1e-18 * sum) break;
        t = tn;
        sign = -sign;
    }
    return -0.5 * u * u - std::log(u * kSqrt2Pi) + std::log(sum);
}

} // namespace ksd
