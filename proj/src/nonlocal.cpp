#include "fracflow/nonlocal.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <set>
#include <string>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <spdlog/spdlog.h>

#include "fracflow/error.hpp"
#include "fracflow/parallel.hpp"

namespace fracflow {
namespace {

// |x-y|^{-2-s} from the squared distance.
inline double kernel(double d2, double s) { return std::pow(d2, -1.0 - 0.5 * s); }

// Hurwitz zeta(a, m+1) = zeta(a) - sum_{k<=m} k^{-a}, valid for every a != 1.
double hurwitz_tail(double a, int m) {
    double z = boost::math::zeta(a);
    for (int k = 1; k <= m; ++k) z -= std::pow(static_cast<double>(k), -a);
    return z;
}

// Neumaier sum of term(j) over all j outside the window |j-i| <= m, in fixed
// cyclic order starting at i+m+1.
template <class Term>
double row_sum(std::size_t n, std::size_t i, int m, Term&& term) {
    NeumaierSum acc;
    const std::size_t count = n - 2 * static_cast<std::size_t>(m) - 1;
    std::size_t j = (i + static_cast<std::size_t>(m) + 1) % n;
    for (std::size_t t = 0; t < count; ++t) {
        acc.add(term(j));
        if (++j == n) j = 0;
    }
    return acc.value();
}

// Symmetric table of |x_i - x_j|^{-2-s}; bitwise symmetric by construction.
class KernelTable {
public:
    KernelTable(const ConvexCurve& curve, double s) : n_(curve.size()), k_(n_ * n_, 0.0) {
        const auto& p = curve.points();
        parallel_for(n_, [&](std::size_t i) {
            for (std::size_t j = i + 1; j < n_; ++j) k_[i * n_ + j] = kernel(norm2(p[j] - p[i]), s);
        });
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j) k_[j * n_ + i] = k_[i * n_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const { return k_[i * n_ + j]; }

private:
    std::size_t n_;
    std::vector<double> k_;
};

// Pointwise kernel with exactly the table's rounding (norm2(a-b) == norm2(b-a)).
struct DirectKernel {
    const std::vector<Vec2>& p;
    double s;
    double operator()(std::size_t i, std::size_t j) const { return kernel(norm2(p[j] - p[i]), s); }
};

template <class K>
double hs_row(const ConvexCurve& c, const K& k, std::size_t i, int m) {
    const auto& p = c.points();
    const auto& nu = c.normals();
    const auto& w = c.weights();
    return row_sum(c.size(), i, m, [&](std::size_t j) { return w[j] * dot(p[j] - p[i], nu[j]) * k(i, j); });
}

template <class K>
double a2_row(const ConvexCurve& c, const K& k, std::size_t i, int m) {
    const auto& nu = c.normals();
    const auto& w = c.weights();
    return row_sum(c.size(), i, m, [&](std::size_t j) { return w[j] * (1.0 - dot(nu[i], nu[j])) * k(i, j); });
}

template <class K>
double per_row(const ConvexCurve& c, const K& k, std::size_t i, int m) {
    const auto& p = c.points();
    const auto& nu = c.normals();
    const auto& w = c.weights();
    return row_sum(c.size(), i, m,
                   [&](std::size_t j) { return w[j] * dot(nu[i], nu[j]) * norm2(p[j] - p[i]) * k(i, j); });
}

template <class K>
double tangential_row(const ConvexCurve& c, const K& k, std::size_t i, int m) {
    const auto& nu = c.normals();
    const auto& w = c.weights();
    const Vec2 t = c.tangents()[i];
    return row_sum(c.size(), i, m, [&](std::size_t j) { return w[j] * dot(nu[j], t) * k(i, j); });
}

double hs_correction(const ConvexCurve& c, const WindowCorrection& wc, std::size_t i) {
    return 0.5 * c.kappa()[i] * wc.even[i];
}

double a2_correction(const ConvexCurve& c, const WindowCorrection& wc, std::size_t i) {
    const double k = c.kappa()[i];
    return 0.5 * k * k * wc.even[i];
}

double tangential_correction(const ConvexCurve& c, const WindowCorrection& wc, std::size_t i) {
    const auto& e = c.edges();
    const auto& kappa = c.kappa();
    const std::size_t ip = c.next(i), im = c.prev(i);
    const double dkappa = (kappa[ip] - kappa[im]) / (e[im] + e[i]);
    return kappa[i] * wc.odd[i] + 0.5 * dkappa * wc.even[i];
}

}  // namespace

FractionalOrder::FractionalOrder(double s) : s_(s) {
    if (!(s > 0.0 && s < 1.0))
        throw Error(ErrorKind::InvalidOrder, "s must lie strictly between 0 and 1, got " + std::to_string(s));
    if (s <= 0.02 || s >= 0.98) {
        static std::mutex mu;
        static std::set<double> warned;
        std::lock_guard lock(mu);
        if (warned.insert(s).second)
            spdlog::warn("s = {} is close to an endpoint of (0,1); quadrature errors are amplified", s);
    }
}

void validate_policy(const KernelPolicy& policy, std::size_t n) {
    const int m = policy.singular_window;
    if (m < 1 || static_cast<std::size_t>(m) * 8 > n)
        throw Error(ErrorKind::WindowTooLarge,
                    "singular window m = " + std::to_string(m) + " must satisfy 1 <= m <= N/8 (N = " +
                        std::to_string(n) + ")");
}

WindowCorrection window_correction(const ConvexCurve& curve, double s, int m) {
    const std::size_t n = curve.size();
    const auto& e = curve.edges();
    const double z_even = hurwitz_tail(s, m);
    const double z_odd = hurwitz_tail(1.0 + s, m);
    WindowCorrection wc;
    wc.even.resize(n);
    wc.odd.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double fwd = 0.0, back = 0.0;
        for (int k = 0; k <= m; ++k) {
            fwd += e[(i + k) % n];
            back += e[(i + n - 1 - k) % n];
        }
        fwd /= (m + 1);
        back /= (m + 1);
        wc.even[i] = -z_even * (std::pow(fwd, 1.0 - s) + std::pow(back, 1.0 - s));
        wc.odd[i] = z_odd * (std::pow(back, -s) - std::pow(fwd, -s));
    }
    return wc;
}

double h_s_boundary(const ConvexCurve& curve, FractionalOrder s, std::size_t i, const KernelPolicy& policy) {
    validate_policy(policy, curve.size());
    double sum = hs_row(curve, DirectKernel{curve.points(), s}, i, policy.singular_window);
    if (policy.correction_enabled)
        sum += hs_correction(curve, window_correction(curve, s, policy.singular_window), i);
    return 2.0 * (1.0 - s) * sum;
}

std::vector<double> h_s_all(const ConvexCurve& curve, FractionalOrder s, const KernelPolicy& policy) {
    return sweep(curve, s, policy).h_s;
}

double h_s_tangential_derivative(const ConvexCurve& curve, FractionalOrder s, std::size_t i,
                                 const KernelPolicy& policy) {
    validate_policy(policy, curve.size());
    double sum = tangential_row(curve, DirectKernel{curve.points(), s}, i, policy.singular_window);
    if (policy.correction_enabled)
        sum += tangential_correction(curve, window_correction(curve, s, policy.singular_window), i);
    return 2.0 * s * (1.0 - s) * sum;
}

std::vector<double> h_s_tangential_all(const ConvexCurve& curve, FractionalOrder s, const KernelPolicy& policy) {
    validate_policy(policy, curve.size());
    const KernelTable k(curve, s);
    const WindowCorrection wc = window_correction(curve, s, policy.singular_window);
    std::vector<double> out(curve.size());
    parallel_for(curve.size(), [&](std::size_t i) {
        double sum = tangential_row(curve, k, i, policy.singular_window);
        if (policy.correction_enabled) sum += tangential_correction(curve, wc, i);
        out[i] = 2.0 * s * (1.0 - s) * sum;
    });
    return out;
}

double nonlocal_a2(const ConvexCurve& curve, FractionalOrder s, std::size_t i, const KernelPolicy& policy) {
    validate_policy(policy, curve.size());
    double sum = a2_row(curve, DirectKernel{curve.points(), s}, i, policy.singular_window);
    if (policy.correction_enabled)
        sum += a2_correction(curve, window_correction(curve, s, policy.singular_window), i);
    return sum;
}

std::vector<double> nonlocal_a2_all(const ConvexCurve& curve, FractionalOrder s, const KernelPolicy& policy) {
    return sweep(curve, s, policy, {.a2 = true}).a2;
}

double nonlocal_laplace(const ConvexCurve& curve, FractionalOrder s, std::span<const double> f, std::size_t i,
                        const KernelPolicy& policy) {
    const std::size_t n = curve.size();
    validate_policy(policy, n);
    if (f.size() != n) throw Error(ErrorKind::PreconditionViolated, "f must have one value per curve point");
    const DirectKernel k{curve.points(), s};
    const auto& w = curve.weights();
    double sum = row_sum(n, i, policy.singular_window, [&](std::size_t j) { return w[j] * (f[j] - f[i]) * k(i, j); });
    if (policy.correction_enabled) {
        const WindowCorrection wc = window_correction(curve, s, policy.singular_window);
        const double hp = curve.edges()[i];
        const double hm = curve.edges()[curve.prev(i)];
        const double fp = f[curve.next(i)], fm = f[curve.prev(i)], f0 = f[i];
        const double denom = hp * hm * (hp + hm);
        const double d1 = (hm * hm * (fp - f0) + hp * hp * (f0 - fm)) / denom;
        const double d2 = 2.0 * (hm * (fp - f0) - hp * (f0 - fm)) / denom;
        sum += d1 * wc.odd[i] + 0.5 * d2 * wc.even[i];
    }
    return sum;
}

double per_s_boundary(const ConvexCurve& curve, FractionalOrder s, const PerimeterCalibration& calibration,
                      const KernelPolicy& policy) {
    return *sweep(curve, s, policy, {.per_s = true}, calibration).per_s;
}

double isoperimetric_ratio(const ConvexCurve& curve, FractionalOrder s, const PerimeterCalibration& calibration,
                           const KernelPolicy& policy) {
    const double per = per_s_boundary(curve, s, calibration, policy);
    return per * per / std::pow(enclosed_area(curve), 2.0 - s);
}

SweepResult sweep(const ConvexCurve& curve, FractionalOrder s, const KernelPolicy& policy, SweepRequest request,
                  const PerimeterCalibration& calibration) {
    const std::size_t n = curve.size();
    validate_policy(policy, n);
    if (request.per_s && !calibration.prefactor)
        throw Error(ErrorKind::CalibrationMissing, "perimeter prefactor has not been calibrated");
    const int m = policy.singular_window;
    const KernelTable k(curve, s);
    const WindowCorrection wc = window_correction(curve, s, m);
    const bool corr = policy.correction_enabled;

    SweepResult out;
    out.h_s.resize(n);
    if (request.a2) out.a2.resize(n);
    std::vector<double> per(request.per_s ? n : 0);
    parallel_for(n, [&](std::size_t i) {
        out.h_s[i] = 2.0 * (1.0 - s) * (hs_row(curve, k, i, m) + (corr ? hs_correction(curve, wc, i) : 0.0));
        if (request.a2) out.a2[i] = a2_row(curve, k, i, m) + (corr ? a2_correction(curve, wc, i) : 0.0);
        if (request.per_s) per[i] = per_row(curve, k, i, m) + (corr ? wc.even[i] : 0.0);
    });
    if (request.per_s) {
        NeumaierSum acc;
        for (std::size_t i = 0; i < n; ++i) acc.add(curve.weights()[i] * per[i]);
        out.per_s = *calibration.prefactor * (1.0 - s) / s * acc.value();
    }
    return out;
}

double unit_circle_hs(double s) {
    return (1.0 - s) * std::pow(2.0, 1.0 - s) * std::sqrt(std::numbers::pi) *
           boost::math::tgamma_ratio(0.5 * (1.0 - s), 1.0 - 0.5 * s);
}

double hs_lower_bound(double s, double outer_radius) {
    return 2.0 * std::numbers::pi * (1.0 - s) * std::pow(2.0 * outer_radius, -s);
}

double richardson_limit(std::span<const double> eps, std::span<const double> values) {
    if (eps.size() != values.size() || eps.empty())
        throw Error(ErrorKind::PreconditionViolated, "richardson_limit needs matching, non-empty inputs");
    std::vector<double> p(values.begin(), values.end());
    const std::size_t n = p.size();
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = 0; i + level < n; ++i)
            p[i] = (eps[i + level] * p[i] - eps[i] * p[i + 1]) / (eps[i + level] - eps[i]);
    return p[0];
}

}  // namespace fracflow
