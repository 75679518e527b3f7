#pragma once

// Path engines on the half line [L, infinity):
//   engine 1 -- driftless chain with reflected-density sampling and crossing
//               flags (direct backend), or plain driftless Euler re-weighted
//               by the m-bar product (importance backend);
//   engine 2 -- symmetrized reflected Euler scheme with drift;
//   killed   -- drifted Euler with bridge killing.

#include "ksd/model.hpp"
#include "ksd/path.hpp"
#include "ksd/rng.hpp"

namespace ksd {

/// Probability that the Euler bridge pinned at (x_prev, x_next) crossed the
/// boundary inside one step: exp(-2 (x_prev-L)(x_next-L) / (a_prev dt)).
/// Returns 1 when either endpoint touches or crosses L; clamps to 0 instead
/// of underflowing far from the boundary.
double crossing_prob(double x_prev, double x_next, double L, double a_prev, double dt);

struct ReflectedDraw {
    double y;  // L + |x - L + sigma sqrt(dt) g|
    double z;  // (y - x) / sigma, so y = x + sigma z exactly
};

/// One transition of the driftless reflected chain.
ReflectedDraw reflected_step(double x, double sigma_x, double L, double dt, double gauss);

/// Crossing indicator. The importance backend tests u <= p directly; the
/// direct backend uses the conditional flag probability 2p/(1+p) under the
/// m-bar-weighted measure given the reflected-density sample.
bool crossing_flag(double p, double u, Backend backend);

void simulate_engine1(const CoefficientModel& model, double dt, int nsteps,
                      const RngStream& stream, double x0, Backend backend,
                      PathRecord& out);

void simulate_engine2(const CoefficientModel& model, double dt, int nsteps,
                      const RngStream& stream, double x0, PathRecord& out);

enum class SurvivalMode {
    bernoulli,    // U_i > p_i and X_i > L, each step; survival in {0,1}
    conditional,  // product of (1 - p_i) 1{X_i > L}; uniforms integrated out
    discrete      // discrete monitoring only: 1{X_i > L}; no bridge factor
};

struct KilledResult {
    double terminal;
    double survival;  // in [0,1]
};

KilledResult simulate_killed(const CoefficientModel& model, double dt, int nsteps,
                             const RngStream& stream, double x0, SurvivalMode mode);

// Grid-based conveniences.
inline void simulate_engine1(const CoefficientModel& m, const TimeGrid& g,
                             const RngStream& s, double x0, Backend b, PathRecord& out) {
    simulate_engine1(m, g.dt(), g.steps(), s, x0, b, out);
}
inline void simulate_engine2(const CoefficientModel& m, const TimeGrid& g,
                             const RngStream& s, double x0, PathRecord& out) {
    simulate_engine2(m, g.dt(), g.steps(), s, x0, out);
}
inline KilledResult simulate_killed(const CoefficientModel& m, const TimeGrid& g,
                                    const RngStream& s, double x0, SurvivalMode mode) {
    return simulate_killed(m, g.dt(), g.steps(), s, x0, mode);
}

} // namespace ksd
