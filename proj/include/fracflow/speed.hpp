#pragma once

#include <string>
#include <vector>

namespace fracflow {

enum class SpeedKind { Identity, Power, Exponential, Log1p };

/// Normal speed Phi(H_s). The registry is closed so that the growth
/// conditions can be checked; arguments below zero are clamped to zero.
class SpeedFunction {
public:
    static SpeedFunction identity() { return SpeedFunction(SpeedKind::Identity, 1.0); }
    /// a^p, p > 0. Throws Error{ConfigInvalid}.
    static SpeedFunction power(double p);
    static SpeedFunction exponential() { return SpeedFunction(SpeedKind::Exponential, 1.0); }
    static SpeedFunction log1p() { return SpeedFunction(SpeedKind::Log1p, 1.0); }
    /// "identity" | "power" | "exponential" | "log1p". Throws Error{ConfigInvalid}.
    static SpeedFunction from_name(const std::string& kind, double p = 1.0);

    double operator()(double a) const;
    double derivative(double a) const;
    /// Phi'(a) / Phi(a), finite where Phi itself overflows.
    double log_derivative(double a) const;

    SpeedKind kind() const noexcept { return kind_; }
    double exponent() const noexcept { return p_; }
    std::string name() const;

    bool operator==(const SpeedFunction&) const = default;

private:
    SpeedFunction(SpeedKind kind, double p) : kind_(kind), p_(p) {}
    SpeedKind kind_;
    double p_;
};

/// Sampled versions of the three growth conditions on Phi:
/// increasing (Phi' > 0 on a grid), unbounded (Phi(1e6) > 1e3 Phi(1)) and
/// superlinear ratio (Phi'(a) a^2 / Phi(a) increasing over 1e2, 1e3, 1e4).
struct SpeedCheck {
    bool increasing{false};
    bool unbounded{false};
    bool ratio_growth{false};
    std::vector<std::string> notes;
    bool ok() const { return increasing && unbounded && ratio_growth; }
};
SpeedCheck check_speed(const SpeedFunction& phi);

}  // namespace fracflow
