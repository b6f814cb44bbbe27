#include "fracflow/speed.hpp"

#include <cmath>

#include <fmt/core.h>

#include "fracflow/error.hpp"

namespace fracflow {

SpeedFunction SpeedFunction::power(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw Error(ErrorKind::ConfigInvalid, fmt::format("speed.p = {} must be > 0", p));
    return SpeedFunction(SpeedKind::Power, p);
}

SpeedFunction SpeedFunction::from_name(const std::string& kind, double p) {
    if (kind == "identity") return identity();
    if (kind == "power") return power(p);
    if (kind == "exponential") return exponential();
    if (kind == "log1p") return log1p();
    throw Error(ErrorKind::ConfigInvalid, fmt::format("speed.kind: unknown speed '{}'", kind));
}

double SpeedFunction::operator()(double a) const {
    a = std::max(a, 0.0);
    switch (kind_) {
        case SpeedKind::Identity: return a;
        case SpeedKind::Power: return std::pow(a, p_);
        case SpeedKind::Exponential: return std::exp(a);
        case SpeedKind::Log1p: return std::log1p(a);
    }
    return a;
}

double SpeedFunction::derivative(double a) const {
    a = std::max(a, 0.0);
    switch (kind_) {
        case SpeedKind::Identity: return 1.0;
        case SpeedKind::Power: return p_ * std::pow(a, p_ - 1.0);
        case SpeedKind::Exponential: return std::exp(a);
        case SpeedKind::Log1p: return 1.0 / (1.0 + a);
    }
    return 1.0;
}

double SpeedFunction::log_derivative(double a) const {
    a = std::max(a, 0.0);
    switch (kind_) {
        case SpeedKind::Identity: return 1.0 / a;
        case SpeedKind::Power: return p_ / a;
        case SpeedKind::Exponential: return 1.0;
        case SpeedKind::Log1p: return 1.0 / ((1.0 + a) * std::log1p(a));
    }
    return 1.0 / a;
}

std::string SpeedFunction::name() const {
    switch (kind_) {
        case SpeedKind::Identity: return "identity";
        case SpeedKind::Power: return "power";
        case SpeedKind::Exponential: return "exponential";
        case SpeedKind::Log1p: return "log1p";
    }
    return "identity";
}

SpeedCheck check_speed(const SpeedFunction& phi) {
    SpeedCheck out;
    out.increasing = true;
    for (double a = 1e-3; a <= 1e4; a *= 1.5) {
        if (!(phi.derivative(a) > 0.0)) {
            out.increasing = false;
            out.notes.push_back(fmt::format("Phi'({}) <= 0", a));
            break;
        }
    }
    out.unbounded = phi(1e6) > 1e3 * phi(1.0);
    if (!out.unbounded)
        out.notes.push_back(fmt::format("Phi(1e6) = {:.6g} is not above 1e3 Phi(1) = {:.6g}", phi(1e6), 1e3 * phi(1.0)));
    auto r = [&](double a) { return phi.log_derivative(a) * a * a; };
    const double r2 = r(1e2), r3 = r(1e3), r4 = r(1e4);
    out.ratio_growth = r2 < r3 && r3 < r4;
    if (!out.ratio_growth)
        out.notes.push_back(fmt::format("Phi'(a)a^2/Phi(a) = {:.6g}, {:.6g}, {:.6g} at a = 1e2, 1e3, 1e4", r2, r3, r4));
    return out;
}

}  // namespace fracflow
