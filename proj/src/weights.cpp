#include "ksd/weights.hpp"

namespace ksd {

WeightState fold_weights(const PathRecord& path, const CoefficientModel& model,
                         const BoundaryConstants& consts) {
    WeightState w;
    const double L = model.boundary();
    const double dt = path.dt;
    const double sqrt_dt = std::sqrt(dt);
    int i = 0;
    for (const PathStep& s : path.steps) {
        ++i;
        const DerivedCoeffs c = model.derived(s.x_prev);
        if (path.engine == Engine::reflected_q) {
            if (i == path.last_cross) w.E_before_last_cross = w.E;
            const double u = (s.x_prev - L) / (c.sigma * sqrt_dt);
            w.E *= step_e(c, s.z, s.flag, u, dt);
            w.logK += step_kappa(c, s.z, dt);
            w.Ehat *= step_ehat(c, s.dw, s.flag, s.x_next, L, consts, dt);
        }
        w.B += s.db;
        w.logPsi += step_psi(c, s.dw, s.db, consts, dt);
        w.step = i;
    }
    return w;
}

} // namespace ksd
