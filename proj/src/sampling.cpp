#include "ksd/sampling.hpp"

#include "ksd/weights.hpp"

#include <cmath>

namespace ksd {

double crossing_prob(double x_prev, double x_next, double L, double a_prev, double dt) {
    const double d0 = x_prev - L;
    const double d1 = x_next - L;
    if (d0 <= 0.0 || d1 <= 0.0) return 1.0;
    const double expo = -2.0 * d0 * d1 / (a_prev * dt);
    if (expo < -700.0) return 0.0;
    return std::exp(expo);
}

ReflectedDraw reflected_step(double x, double sigma_x, double L, double dt, double gauss) {
    const double prop = (x - L) + sigma_x * std::sqrt(dt) * gauss;
    const double y = L + std::fabs(prop);
    return {y, (y - x) / sigma_x};
}

bool crossing_flag(double p, double u, Backend backend) {
    // strict comparison so p = 0 never flags, even on a u = 0 draw
    if (backend == Backend::importance) return u < p;
    return u * (1.0 + p) < 2.0 * p;
}

void simulate_engine1(const CoefficientModel& model, double dt, int nsteps,
                      const RngStream& stream, double x0, Backend backend,
                      PathRecord& out) {
    out.reset(x0, dt, Engine::reflected_q, backend);
    out.steps.reserve(nsteps);
    const double L = model.boundary();
    const double sqrt_dt = std::sqrt(dt);
    double x = x0;
    for (int i = 0; i < nsteps; ++i) {
        const double g = stream.normal(i);
        const double sx = model.sigma(x);
        PathStep s;
        s.x_prev = x;
        if (backend == Backend::direct) {
            const ReflectedDraw rd = reflected_step(x, sx, L, dt, g);
            s.x_next = rd.y;
            s.z = rd.z;
        } else {
            s.z = sqrt_dt * g;
            s.x_next = x + sx * s.z;
        }
        s.p = crossing_prob(x, s.x_next, L, sx * sx, dt);
        const double u = stream.uniform(i, Sub::flag);
        s.flag = crossing_flag(s.p, u, backend);
        if (backend == Backend::importance)
            out.mbar_weight *= (s.x_next > L) ? (s.flag ? 2.0 : 1.0) : 0.0;
        s.dw = s.z - model.drift(x) / sx * dt;
        s.db = regulator_increment(x, sx, L, dt);
        if (s.flag) {
            if (out.first_cross == 0) out.first_cross = i + 1;
            out.last_cross = i + 1;
        }
        out.steps.push_back(s);
        x = s.x_next;
    }
    out.terminal = x;
}

void simulate_engine2(const CoefficientModel& model, double dt, int nsteps,
                      const RngStream& stream, double x0, PathRecord& out) {
    out.reset(x0, dt, Engine::reflected_sym, Backend::direct);
    out.steps.reserve(nsteps);
    const double L = model.boundary();
    const double sqrt_dt = std::sqrt(dt);
    double x = x0;
    for (int i = 0; i < nsteps; ++i) {
        const double g = stream.normal(i);
        const double sx = model.sigma(x);
        const double bx = model.drift(x);
        PathStep s;
        s.x_prev = x;
        s.dw = sqrt_dt * g;
        const double prop = x + bx * dt + sx * s.dw;
        if (prop < L) {
            s.x_next = 2.0 * L - prop;
            s.db = 2.0 * (L - prop);
            s.p = 1.0;
            s.flag = true;
        } else {
            s.x_next = prop;
            s.db = 0.0;
            s.p = crossing_prob(x, s.x_next, L, sx * sx, dt);
            s.flag = stream.uniform(i, Sub::aux) < s.p;
        }
        s.z = s.dw + bx / sx * dt;
        if (s.flag) {
            if (out.first_cross == 0) out.first_cross = i + 1;
            out.last_cross = i + 1;
        }
        out.steps.push_back(s);
        x = s.x_next;
    }
    out.terminal = x;
}

KilledResult simulate_killed(const CoefficientModel& model, double dt, int nsteps,
                             const RngStream& stream, double x0, SurvivalMode mode) {
    const double L = model.boundary();
    const double sqrt_dt = std::sqrt(dt);
    double x = x0;
    double survival = x0 > L ? 1.0 : 0.0;
    if (survival == 0.0) return {x0, 0.0};
    for (int i = 0; i < nsteps; ++i) {
        const double g = stream.normal(i);
        const double sx = model.sigma(x);
        const double y = x + model.drift(x) * dt + sx * sqrt_dt * g;
        if (y <= L) return {y, 0.0};
        if (mode != SurvivalMode::discrete) {
            const double p = crossing_prob(x, y, L, sx * sx, dt);
            if (mode == SurvivalMode::bernoulli) {
                if (stream.uniform(i, Sub::flag) < p) return {y, 0.0};
            } else {
                survival *= 1.0 - p;
                if (survival == 0.0) return {y, 0.0};
            }
        }
        x = y;
    }
    return {x, survival};
}

} // namespace ksd
