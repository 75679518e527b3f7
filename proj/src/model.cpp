#include "ksd/model.hpp"

#include <cmath>
#include <stdexcept>

namespace ksd {

namespace {

double get_param(const std::map<std::string, double>& params, const char* key,
                 double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params,
                    std::initializer_list<const char*> known,
                    const std::string& ctx) {
    for (const auto& [k, v] : params) {
        bool found = false;
        for (const char* ok : known)
            if (k == ok) found = true;
        if (!found) throw std::invalid_argument(ctx + ": unknown parameter '" + k + "'");
    }
}

// max of |2u/(1+u^2)^2| over u, attained at u = 1/sqrt(3)
constexpr double kRatSlopeMax = 0.649519052838329;

} // namespace

CoefficientModel CoefficientModel::make(const std::string& name,
                                        const std::map<std::string, double>& params,
                                        double boundary_L) {
    CoefficientModel m;
    m.name_ = name;
    m.L_ = boundary_L;
    if (name == "constant") {
        reject_unknown(params, {"beta", "sigma"}, "model constant");
        m.family_ = ModelFamily::constant;
        m.beta_ = get_param(params, "beta", 0.0);
        m.s0_ = get_param(params, "sigma", 1.0);
        m.b_max_ = std::fabs(m.beta_);
        m.bp_max_ = 0.0;
        m.sp_max_ = 0.0;
        m.c_min_ = m.s0_;
        m.sigma_max_ = m.s0_;
    } else if (name == "tanh-drift") {
        reject_unknown(params, {"beta", "s0", "s1"}, "model tanh-drift");
        m.family_ = ModelFamily::tanh_drift;
        m.beta_ = get_param(params, "beta", 0.5);
        m.s0_ = get_param(params, "s0", 1.0);
        m.s1_ = get_param(params, "s1", 0.25);
        m.b_max_ = std::fabs(m.beta_);
        m.bp_max_ = std::fabs(m.beta_);
        m.sp_max_ = kRatSlopeMax * std::fabs(m.s1_);
        m.c_min_ = m.s0_;
        m.sigma_max_ = m.s0_ + std::fabs(m.s1_);
    } else if (name == "rational-sigma") {
        reject_unknown(params, {"beta", "s0", "s1"}, "model rational-sigma");
        m.family_ = ModelFamily::rational_sigma;
        m.beta_ = get_param(params, "beta", 0.3);
        m.s0_ = get_param(params, "s0", 1.0);
        m.s1_ = get_param(params, "s1", 0.5);
        m.b_max_ = 0.5 * std::fabs(m.beta_);
        m.bp_max_ = std::fabs(m.beta_);
        m.sp_max_ = kRatSlopeMax * std::fabs(m.s1_);
        m.c_min_ = m.s0_;
        m.sigma_max_ = m.s0_ + std::fabs(m.s1_);
    } else {
        throw std::invalid_argument("unknown model '" + name + "'");
    }
    if (m.c_min_ <= 0.0)
        throw std::invalid_argument("model " + name + ": ellipticity floor must be positive");
    if (m.s1_ < 0.0)
        throw std::invalid_argument("model " + name + ": s1 must be nonnegative");
    return m;
}

double CoefficientModel::drift(double x) const {
    const double u = x - L_;
    switch (family_) {
        case ModelFamily::constant: return beta_;
        case ModelFamily::tanh_drift: return beta_ * std::tanh(u);
        case ModelFamily::rational_sigma: return beta_ * u / (1.0 + u * u);
    }
    return 0.0;
}

double CoefficientModel::drift_prime(double x) const {
    const double u = x - L_;
    switch (family_) {
        case ModelFamily::constant: return 0.0;
        case ModelFamily::tanh_drift: {
            const double t = std::tanh(u);
            return beta_ * (1.0 - t * t);
        }
        case ModelFamily::rational_sigma: {
            const double d = 1.0 + u * u;
            return beta_ * (1.0 - u * u) / (d * d);
        }
    }
    return 0.0;
}

double CoefficientModel::sigma(double x) const {
    const double u = x - L_;
    switch (family_) {
        case ModelFamily::constant: return s0_;
        case ModelFamily::tanh_drift: return s0_ + s1_ / (1.0 + u * u);
        case ModelFamily::rational_sigma: return s0_ + s1_ * u * u / (1.0 + u * u);
    }
    return s0_;
}

double CoefficientModel::sigma_prime(double x) const {
    const double u = x - L_;
    switch (family_) {
        case ModelFamily::constant: return 0.0;
        case ModelFamily::tanh_drift: {
            const double d = 1.0 + u * u;
            return -2.0 * s1_ * u / (d * d);
        }
        case ModelFamily::rational_sigma: {
            const double d = 1.0 + u * u;
            return 2.0 * s1_ * u / (d * d);
        }
    }
    return 0.0;
}

DerivedCoeffs CoefficientModel::derived(double x) const {
    DerivedCoeffs c;
    c.b = drift(x);
    c.bp = drift_prime(x);
    c.sigma = sigma(x);
    c.sigmap = sigma_prime(x);
    c.a = c.sigma * c.sigma;
    c.ap = 2.0 * c.sigma * c.sigmap;
    c.bbar = c.bp - c.sigmap * c.b / c.sigma;
    c.boa = c.b / c.a;
    c.boap = (c.bp * c.a - c.b * c.ap) / (c.a * c.a);
    return c;
}

bool CoefficientModel::has_drift() const { return beta_ != 0.0; }

TestFunction TestFunction::make(const std::string& name,
                                const std::map<std::string, double>& params,
                                double boundary_L) {
    TestFunction f;
    f.name_ = name;
    f.L_ = boundary_L;
    if (name == "expm") {
        reject_unknown(params, {}, "payoff expm");
        f.kind_ = Kind::expm;
        f.cls_ = PayoffClass::c1_bounded;
    } else if (name == "smoothstep") {
        reject_unknown(params, {"width"}, "payoff smoothstep");
        f.kind_ = Kind::smoothstep;
        f.cls_ = PayoffClass::c1_bounded;
        f.width_ = get_param(params, "width", 1.0);
        if (f.width_ <= 0.0) throw std::invalid_argument("smoothstep: width must be positive");
    } else if (name == "indicator") {
        reject_unknown(params, {"level"}, "payoff indicator");
        f.kind_ = Kind::indicator;
        f.cls_ = PayoffClass::bounded_measurable;
        f.level_ = get_param(params, "level", boundary_L + 1.0);
        if (f.level_ < boundary_L)
            throw std::invalid_argument("indicator: level must be >= boundary");
    } else {
        throw std::invalid_argument("unknown payoff '" + name + "'");
    }
    return f;
}

double TestFunction::value(double y) const {
    switch (kind_) {
        case Kind::expm: return 1.0 - std::exp(-(y - L_));
        case Kind::smoothstep: {
            const double t = (y - L_) / width_;
            if (t <= 0.0) return 0.0;
            if (t >= 1.0) return 1.0;
            return t * t * (3.0 - 2.0 * t);
        }
        case Kind::indicator: return y > level_ ? 1.0 : 0.0;
    }
    return 0.0;
}

double TestFunction::deriv(double y) const {
    switch (kind_) {
        case Kind::expm: return std::exp(-(y - L_));
        case Kind::smoothstep: {
            const double t = (y - L_) / width_;
            if (t <= 0.0 || t >= 1.0) return 0.0;
            return 6.0 * t * (1.0 - t) / width_;
        }
        case Kind::indicator:
            throw std::logic_error("indicator payoff has no derivative");
    }
    return 0.0;
}

std::vector<double> TestFunction::breakpoints() const {
    switch (kind_) {
        case Kind::expm: return {};
        case Kind::smoothstep: return {L_ + width_};
        case Kind::indicator: return {level_};
    }
    return {};
}

TimeGrid::TimeGrid(double T, int n) : T_(T), n_(n), dt_(T / n) {
    if (n < 1) throw std::invalid_argument("time grid needs n >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("time grid needs T > 0");
    if (dt_ > 1.0) throw std::invalid_argument("time grid needs dt <= 1");
}

ValidationReport validate(const CoefficientModel& model, const TestFunction& payoff,
                          const std::vector<double>& probe_grid) {
    ValidationReport rep;
    const double L = model.boundary();
    constexpr double kFdStep = 1e-5;
    constexpr double kFdTol = 1e-6;

    if (probe_grid.empty()) {
        rep.violations.push_back("probe grid is empty");
        return rep;
    }
    if (std::fabs(payoff.value(L)) > 0.0)
        rep.violations.push_back("payoff: f(L)=0 violated, f(L)=" +
                                 std::to_string(payoff.value(L)));

    for (double x : probe_grid) {
        if (x < L) {
            rep.violations.push_back("probe point below boundary: " + std::to_string(x));
            continue;
        }
        const double s = model.sigma(x);
        if (s < model.c_min() - 1e-12)
            rep.violations.push_back("ellipticity breach at x=" + std::to_string(x) +
                                     ": sigma=" + std::to_string(s));
        if (std::fabs(model.drift(x)) > model.b_max() + 1e-12)
            rep.violations.push_back("drift bound breach at x=" + std::to_string(x));
        if (std::fabs(model.drift_prime(x)) > model.bp_max() + 1e-12)
            rep.violations.push_back("drift-derivative bound breach at x=" + std::to_string(x));
        if (std::fabs(model.sigma_prime(x)) > model.sp_max() + 1e-12)
            rep.violations.push_back("sigma-derivative bound breach at x=" + std::to_string(x));

        const double fd_b = (model.drift(x + kFdStep) - model.drift(x - kFdStep)) / (2 * kFdStep);
        if (std::fabs(fd_b - model.drift_prime(x)) > kFdTol)
            rep.violations.push_back("drift FD inconsistency at x=" + std::to_string(x));
        const double fd_s = (model.sigma(x + kFdStep) - model.sigma(x - kFdStep)) / (2 * kFdStep);
        if (std::fabs(fd_s - model.sigma_prime(x)) > kFdTol)
            rep.violations.push_back("sigma FD inconsistency at x=" + std::to_string(x));
        if (payoff.has_deriv()) {
            const double fd_f = (payoff.value(x + kFdStep) - payoff.value(x - kFdStep)) / (2 * kFdStep);
            if (std::fabs(fd_f - payoff.deriv(x)) > kFdTol)
                rep.violations.push_back("payoff FD inconsistency at x=" + std::to_string(x));
        }
    }
    return rep;
}

std::vector<std::string> model_names() { return {"constant", "tanh-drift", "rational-sigma"}; }

std::vector<std::string> payoff_names() { return {"expm", "smoothstep", "indicator"}; }

std::vector<double> default_probe_grid(double L) {
    std::vector<double> g;
    g.reserve(1000);
    for (int i = 0; i < 1000; ++i) g.push_back(L + 20.0 * i / 999.0);
    return g;
}

} // namespace ksd
