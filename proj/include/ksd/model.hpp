#pragma once

// Coefficient models, test payoffs and the uniform time grid. Models form
// a closed registry of parametrized families so run configurations stay
// pure data. All evaluations are pure; instances are immutable and safe
// to share across threads.

#include <map>
#include <string>
#include <vector>

namespace ksd {

/// Everything step/weight code needs at one state point.
struct DerivedCoeffs {
    double b;       // drift
    double bp;      // drift derivative
    double sigma;   // diffusion
    double sigmap;  // diffusion derivative
    double a;       // sigma^2
    double ap;      // 2 sigma sigma'
    double bbar;    // b' - sigma' b / sigma
    double boa;     // b / a
    double boap;    // (b/a)' = (b' a - b a') / a^2
};

enum class ModelFamily { constant, tanh_drift, rational_sigma };

class CoefficientModel {
public:
    static CoefficientModel make(const std::string& name,
                                 const std::map<std::string, double>& params,
                                 double boundary_L);

    double drift(double x) const;
    double drift_prime(double x) const;
    double sigma(double x) const;
    double sigma_prime(double x) const;
    DerivedCoeffs derived(double x) const;

    double boundary() const { return L_; }
    const std::string& name() const { return name_; }

    // Declared envelope used by validation.
    double b_max() const { return b_max_; }
    double bp_max() const { return bp_max_; }
    double sp_max() const { return sp_max_; }
    double c_min() const { return c_min_; }
    double sigma_max() const { return sigma_max_; }

    bool has_drift() const;

private:
    CoefficientModel() = default;
    ModelFamily family_ = ModelFamily::constant;
    std::string name_;
    double L_ = 0.0;
    double beta_ = 0.0, s0_ = 1.0, s1_ = 0.0;
    double b_max_ = 0.0, bp_max_ = 0.0, sp_max_ = 0.0, c_min_ = 1.0,
           sigma_max_ = 1.0;
};

enum class PayoffClass { c1_bounded, bounded_measurable };

class TestFunction {
public:
    static TestFunction make(const std::string& name,
                             const std::map<std::string, double>& params,
                             double boundary_L);

    double value(double y) const;
    double deriv(double y) const;  // only when has_deriv()
    bool has_deriv() const { return cls_ == PayoffClass::c1_bounded; }
    PayoffClass payoff_class() const { return cls_; }
    const std::string& name() const { return name_; }

    /// Points where f or f' is non-smooth; quadratures split here.
    std::vector<double> breakpoints() const;

private:
    TestFunction() = default;
    enum class Kind { expm, smoothstep, indicator } kind_ = Kind::expm;
    PayoffClass cls_ = PayoffClass::c1_bounded;
    std::string name_;
    double L_ = 0.0;
    double width_ = 1.0;  // smoothstep ramp width
    double level_ = 1.0;  // indicator threshold
};

/// Uniform partition of [0, T] into n steps.
class TimeGrid {
public:
    TimeGrid(double T, int n);
    double horizon() const { return T_; }
    int steps() const { return n_; }
    double dt() const { return dt_; }
    double time(int i) const { return dt_ * i; }

private:
    double T_;
    int n_;
    double dt_;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks ellipticity, declared bounds, finite-difference consistency of
/// the supplied derivatives (h = 1e-5, tol 1e-6) and f(L) = 0 on the probe
/// grid. Violations are reported, not thrown.
ValidationReport validate(const CoefficientModel& model, const TestFunction& payoff,
                          const std::vector<double>& probe_grid);

std::vector<std::string> model_names();
std::vector<std::string> payoff_names();

/// 1000-point default probe grid on [L, L+20].
std::vector<double> default_probe_grid(double L);

} // namespace ksd
