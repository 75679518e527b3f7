#include "ksd/estimators.hpp"

#include "ksd/weights.hpp"

#include <atomic>
#include <chrono>
#include <stdexcept>

namespace ksd {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_domain(const RunSpec& spec) {
    if (spec.x0 < spec.model.boundary())
        throw std::invalid_argument("estimator: x0 below the boundary");
}

void require_c1(const RunSpec& spec, const char* who) {
    if (!spec.payoff.has_deriv())
        throw std::invalid_argument(std::string(who) +
                                    ": payoff must be C1 with derivative available");
}

EstimatorResult finish(const char* id, const char* engine, const RunSpec& spec,
                       const MeanAccumulator& acc, Clock::time_point t0) {
    EstimatorResult r;
    r.id = id;
    r.engine = engine;
    r.mean = acc.mean;
    r.std_error = acc.std_error();
    r.paths = acc.n;
    r.steps = spec.grid.steps();
    r.seconds = elapsed_since(t0);
    return r;
}

} // namespace

EstimatorResult estimate_value(const RunSpec& spec) {
    require_domain(spec);
    const auto t0 = Clock::now();
    const std::uint64_t seed = derive_seed(spec.seed, seed_tag::value);
    const double dt = spec.grid.dt();
    const int n = spec.grid.steps();
    auto make = [&] {
        return [&, seed](std::uint64_t path) {
            const RngStream stream(seed, path);
            const KilledResult k =
                simulate_killed(spec.model, dt, n, stream, spec.x0, spec.survival);
            return k.survival == 0.0 ? 0.0 : spec.payoff.value(k.terminal) * k.survival;
        };
    };
    const MeanAccumulator acc = mc_run(spec.paths, spec.threads, spec.strict, make);
    return finish("value", "killed", spec, acc, t0);
}

EstimatorResult estimate_deriv_reflected(const RunSpec& spec, Engine engine) {
    require_domain(spec);
    require_c1(spec, "deriv_reflected");
    const auto t0 = Clock::now();
    const bool e1 = engine == Engine::reflected_q;
    const std::uint64_t seed = derive_seed(
        spec.seed, e1 ? seed_tag::deriv_reflected_e1 : seed_tag::deriv_reflected_e2);
    const BoundaryConstants consts = BoundaryConstants::from_model(spec.model);
    const double dt = spec.grid.dt();
    const int n = spec.grid.steps();
    auto make = [&, seed, e1] {
        return [&, seed, e1, rec = PathRecord{}](std::uint64_t path) mutable {
            const RngStream stream(seed, path);
            if (e1) {
                simulate_engine1(spec.model, dt, n, stream, spec.x0, spec.backend, rec);
                if (rec.mbar_weight == 0.0) return 0.0;
                const WeightState w = fold_weights(rec, spec.model, consts);
                return spec.payoff.deriv(rec.terminal) * w.E *
                       std::exp(w.logK + consts.boaL * w.B) * rec.mbar_weight;
            }
            simulate_engine2(spec.model, dt, n, stream, spec.x0, rec);
            const WeightState w = fold_weights(rec, spec.model, consts);
            return spec.payoff.deriv(rec.terminal) * std::exp(w.logPsi);
        };
    };
    const MeanAccumulator acc = mc_run(spec.paths, spec.threads, spec.strict, make);
    return finish("deriv_reflected", e1 ? "1" : "2", spec, acc, t0);
}

EstimatorResult estimate_deriv_mixed(const RunSpec& spec) {
    require_domain(spec);
    require_c1(spec, "deriv_mixed");
    const auto t0 = Clock::now();
    const std::uint64_t seed = derive_seed(spec.seed, seed_tag::deriv_mixed);
    const BoundaryConstants consts = BoundaryConstants::from_model(spec.model);
    const double dt = spec.grid.dt();
    const int n = spec.grid.steps();
    auto make = [&, seed] {
        return [&, seed, rec = PathRecord{}](std::uint64_t path) mutable {
            const RngStream stream(seed, path);
            simulate_engine1(spec.model, dt, n, stream, spec.x0, spec.backend, rec);
            if (rec.mbar_weight == 0.0) return 0.0;
            const WeightState w = fold_weights(rec, spec.model, consts);
            const double K = std::exp(w.logK);
            double sample = spec.payoff.deriv(rec.terminal) * w.E * K;
            if (rec.last_cross > 0)
                sample += consts.boaL * spec.payoff.value(rec.terminal) * K *
                          w.E_before_last_cross;
            return sample * rec.mbar_weight;
        };
    };
    const MeanAccumulator acc = mc_run(spec.paths, spec.threads, spec.strict, make);
    return finish("deriv_mixed", "1", spec, acc, t0);
}

EstimatorResult estimate_deriv_bel(const RunSpec& spec, Engine engine) {
    require_domain(spec);
    const auto t0 = Clock::now();
    const bool e1 = engine == Engine::reflected_q;
    const std::uint64_t seed =
        derive_seed(spec.seed, e1 ? seed_tag::deriv_bel_e1 : seed_tag::deriv_bel_e2);
    const BoundaryConstants consts = BoundaryConstants::from_model(spec.model);
    const double dt = spec.grid.dt();
    const int n = spec.grid.steps();
    const double T = spec.grid.horizon();
    auto make = [&, seed, e1] {
        return [&, seed, e1, rec = PathRecord{}](std::uint64_t path) mutable {
            const RngStream stream(seed, path);
            if (e1)
                simulate_engine1(spec.model, dt, n, stream, spec.x0, spec.backend, rec);
            else
                simulate_engine2(spec.model, dt, n, stream, spec.x0, rec);
            if (rec.mbar_weight == 0.0) return 0.0;
            double log_psi = 0.0;
            double log_k = 0.0;
            double regulator = 0.0;
            double integral = 0.0;  // sum over steps after the last crossing
            for (const PathStep& s : rec.steps) {
                const DerivedCoeffs c = spec.model.derived(s.x_prev);
                if (s.flag)
                    integral = 0.0;
                else if (e1)
                    // driftless-measure martingale increment: the innovation
                    // z carries the regulator push, compensated by db/sigma
                    integral += (s.dw / c.sigma - s.db / c.a) * std::exp(log_psi);
                else
                    integral += s.dw / c.sigma * std::exp(log_psi);
                log_psi += step_psi(c, s.dw, s.db, consts, dt);
                if (e1) {
                    log_k += step_kappa(c, s.z, dt);
                    regulator += s.db;
                }
            }
            // along reflected samples the kappa product limits to the
            // Girsanov factor times exp((b/a)(L) B); remove the extra factor
            const double weight =
                e1 ? std::exp(log_k - consts.boaL * regulator) * rec.mbar_weight : 1.0;
            return spec.payoff.value(rec.terminal) * integral * weight / T;
        };
    };
    const MeanAccumulator acc = mc_run(spec.paths, spec.threads, spec.strict, make);
    return finish("deriv_bel", e1 ? "1" : "2", spec, acc, t0);
}

EstimatorResult estimate_deriv_fd(const RunSpec& spec) {
    require_domain(spec);
    const auto t0 = Clock::now();
    const double h = spec.fd_step();
    if (spec.x0 - h < spec.model.boundary())
        throw std::invalid_argument("deriv_fd: x0 - h falls below the boundary");
    const std::uint64_t seed = derive_seed(spec.seed, seed_tag::deriv_fd);
    const double dt = spec.grid.dt();
    const int n = spec.grid.steps();
    auto make = [&, seed, h] {
        return [&, seed, h](std::uint64_t path) {
            const RngStream stream(seed, path);
            const KilledResult up = simulate_killed(spec.model, dt, n, stream, spec.x0 + h,
                                                    SurvivalMode::conditional);
            const KilledResult dn = simulate_killed(spec.model, dt, n, stream, spec.x0 - h,
                                                    SurvivalMode::conditional);
            const double vu = up.survival == 0.0 ? 0.0 : spec.payoff.value(up.terminal) * up.survival;
            const double vd = dn.survival == 0.0 ? 0.0 : spec.payoff.value(dn.terminal) * dn.survival;
            return (vu - vd) / (2.0 * h);
        };
    };
    const MeanAccumulator acc = mc_run(spec.paths, spec.threads, spec.strict, make);
    EstimatorResult r = finish("deriv_fd", "fd", spec, acc, t0);
    return r;
}

} // namespace ksd
