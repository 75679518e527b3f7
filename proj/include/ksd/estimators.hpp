#pragma once

// Monte Carlo estimators of the killed semigroup value and its spatial
// derivative. Estimation is a map over path indices followed by an
// associative reduction with a fixed chunking plan, so results do not
// depend on the number of worker threads.

#include "ksd/model.hpp"
#include "ksd/path.hpp"
#include "ksd/rng.hpp"
#include "ksd/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

namespace ksd {

/// Single-pass mean/variance accumulator (Welford; Chan merge).
struct MeanAccumulator {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    void merge(const MeanAccumulator& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double d = o.mean - mean;
        const auto total = n + o.n;
        mean += d * static_cast<double>(o.n) / static_cast<double>(total);
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) /
                         static_cast<double>(total);
        n = total;
    }
    double sample_sd() const {
        return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
    }
    double std_error() const {
        return n > 1 ? sample_sd() / std::sqrt(static_cast<double>(n)) : 0.0;
    }
};

namespace detail {
inline constexpr std::uint64_t kChunk = 16384;
}

/// Runs make_sampler()(path_index) over path indices [0, npaths).
/// strict = one sequential pass (bitwise reproducible); otherwise chunks of
/// fixed size are reduced in chunk order, independent of thread count.
template <class MakeSampler>
MeanAccumulator mc_run(std::uint64_t npaths, unsigned threads, bool strict,
                       MakeSampler make_sampler) {
    if (strict || npaths <= detail::kChunk) {
        auto sampler = make_sampler();
        MeanAccumulator acc;
        for (std::uint64_t i = 0; i < npaths; ++i) acc.add(sampler(i));
        return acc;
    }
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::uint64_t nchunks = (npaths + detail::kChunk - 1) / detail::kChunk;
    std::vector<MeanAccumulator> per_chunk(nchunks);
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        auto sampler = make_sampler();
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= nchunks) break;
            MeanAccumulator acc;
            const std::uint64_t lo = c * detail::kChunk;
            const std::uint64_t hi = std::min(npaths, lo + detail::kChunk);
            for (std::uint64_t i = lo; i < hi; ++i) acc.add(sampler(i));
            per_chunk[c] = acc;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    MeanAccumulator total;
    for (const auto& acc : per_chunk) total.merge(acc);
    return total;
}

struct EstimatorResult {
    std::string id;
    std::string engine;  // "1", "2", "killed", "fd"
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t paths = 0;
    int steps = 0;
    double seconds = 0.0;
    std::uint64_t config_hash = 0;
};

struct RunSpec {
    CoefficientModel model;
    TestFunction payoff;
    double x0;
    TimeGrid grid;
    std::uint64_t paths = 100000;
    std::uint64_t seed = 0;
    Backend backend = Backend::direct;
    SurvivalMode survival = SurvivalMode::conditional;
    double fd_h = 0.0;  // <= 0: default 0.05 max(1, |x0 - L|)
    unsigned threads = 0;
    bool strict = false;

    double fd_step() const {
        return fd_h > 0.0 ? fd_h
                          : 0.05 * std::max(1.0, std::fabs(x0 - model.boundary()));
    }
};

// Stable per-estimator seed tags; independent runs per estimator id.
namespace seed_tag {
inline constexpr std::uint64_t value = 1;
inline constexpr std::uint64_t deriv_reflected_e1 = 2;
inline constexpr std::uint64_t deriv_reflected_e2 = 3;
inline constexpr std::uint64_t deriv_mixed = 4;
inline constexpr std::uint64_t deriv_bel_e1 = 5;
inline constexpr std::uint64_t deriv_bel_e2 = 6;
inline constexpr std::uint64_t deriv_fd = 7;
} // namespace seed_tag

/// E[f(X_T) 1{alive}] via the killed Euler chain.
EstimatorResult estimate_value(const RunSpec& spec);

/// est_A: E[f'(Y_T) Psi_T] (engine 2) or the driftless-measure transfer
/// f'(X_n) E K exp((b/a)(L) B) (engine 1). C1 payoffs only.
EstimatorResult estimate_deriv_reflected(const RunSpec& spec, Engine engine);

/// est_B: f' E K + (b/a)(L) f K E_snapshot 1{crossed}; engine 1 only.
EstimatorResult estimate_deriv_mixed(const RunSpec& spec);

/// est_C: (1/T) f(Y_T) sum_{i > last cross} (dw_i / sigma_{i-1}) Psi_{i-1};
/// measurable payoffs allowed. Engine 2 is the reference backend. The
/// engine-1 variant transfers to the driftless sampling measure: the
/// Brownian increment there is dw - db/sigma and the Girsanov weight along
/// reflected samples is exp(log K - (b/a)(L) B).
EstimatorResult estimate_deriv_bel(const RunSpec& spec, Engine engine);

/// Central finite difference of the value under common random numbers,
/// conditional survival weights.
EstimatorResult estimate_deriv_fd(const RunSpec& spec);

} // namespace ksd
