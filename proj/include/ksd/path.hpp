#pragma once

// Per-step state shared between the path engines and the weight folds.

#include <cstdint>
#include <vector>

namespace ksd {

enum class Engine { reflected_q = 1, reflected_sym = 2 };
enum class Backend { direct, importance };

struct PathStep {
    double x_prev;  // state before the step, >= L for reflected engines
    double x_next;  // state after
    double z;       // variance-dt increment, x_next = x_prev + sigma * z on engine 1
    double dw;      // Brownian increment, z - (b/sigma)(x_prev) dt
    double p;       // bridge crossing probability for (x_prev, x_next)
    double db;      // regulator increment (engine dependent), >= 0
    bool flag;      // boundary crossing indicator
};

struct PathRecord {
    Engine engine = Engine::reflected_q;
    Backend backend = Backend::direct;
    double x0 = 0.0;
    double dt = 0.0;           // uniform step size of the generating grid
    double terminal = 0.0;
    double mbar_weight = 1.0;  // product of m-bar factors; 1 except on the importance backend
    int first_cross = 0;       // 1-based step index, 0 = none
    int last_cross = 0;
    std::vector<PathStep> steps;

    void reset(double start, double step_dt, Engine e, Backend b) {
        engine = e;
        backend = b;
        x0 = start;
        dt = step_dt;
        terminal = start;
        mbar_weight = 1.0;
        first_cross = 0;
        last_cross = 0;
        steps.clear();
    }
};

} // namespace ksd
