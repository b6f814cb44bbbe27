#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/beta.hpp>

#include "fracflow/error.hpp"
#include "fracflow/nonlocal.hpp"
#include "fracflow/parallel.hpp"

namespace fracflow {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kChunk = 1u << 14;

// int_0^phi cos(t)^s dt for |phi| < pi/2.
double cos_power_integral(double phi, double s) {
    const double sn = std::sin(phi);
    const double v = 0.5 * boost::math::beta(0.5, 0.5 * (1.0 + s), sn * sn);
    return phi < 0.0 ? -v : v;
}

struct EdgeData {
    Vec2 start;
    double normal_angle;
};

// sum over edges of int_{edge's angular range} L(theta)^{-s} dtheta for an
// interior point x; a ray at angle phi from the edge normal meets the edge
// line at distance p / cos(phi).
double inner_integral(const std::vector<EdgeData>& edges, const std::vector<Vec2>& normals, Vec2 x, double s,
                      std::vector<double>& vertex_angle) {
    const std::size_t n = edges.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 d = edges[k].start - x;
        vertex_angle[k] = std::atan2(d.y, d.x);
    }
    static constexpr std::array<double, 4> gx{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                              0.8611363115940526};
    static constexpr std::array<double, 4> gw{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                              0.3478548451374538};
    NeumaierSum acc;
    for (std::size_t e = 0; e < n; ++e) {
        const double p = dot(normals[e], edges[e].start - x);
        const double beta = edges[e].normal_angle;
        const double a = std::remainder(vertex_angle[e] - beta, kTwoPi);
        const double b = std::remainder(vertex_angle[(e + 1) % n] - beta, kTwoPi);
        const double width = b - a;
        double v;
        if (width < 0.01) {
            v = std::pow(std::cos(0.5 * (a + b)) / p, s) * width;
        } else if (width < 0.2) {
            v = 0.0;
            for (int g = 0; g < 4; ++g) v += gw[g] * std::pow(std::cos(0.5 * (a + b) + 0.5 * width * gx[g]) / p, s);
            v *= 0.5 * width;
        } else {
            v = std::pow(p, -s) * (cos_power_integral(b, s) - cos_power_integral(a, s));
        }
        acc.add(v);
    }
    return acc.value() / s;
}

}  // namespace

MonteCarloEstimate per_s_region(const ConvexCurve& curve, FractionalOrder s, std::size_t mc_samples,
                                std::optional<std::uint64_t> rng_seed) {
    if (!rng_seed) throw Error(ErrorKind::SeedRequired, "per_s_region needs an explicit RNG seed");
    if (mc_samples < 100000) throw Error(ErrorKind::PreconditionViolated, "per_s_region needs at least 1e5 samples");

    const auto& pts = curve.points();
    const std::size_t n = pts.size();
    std::vector<EdgeData> edges(n);
    std::vector<Vec2> normals(n);
    Vec2 lo = pts[0], hi = pts[0];
    for (std::size_t e = 0; e < n; ++e) {
        normals[e] = rotate_cw(normalized(pts[(e + 1) % n] - pts[e]));
        edges[e] = {pts[e], std::atan2(normals[e].y, normals[e].x)};
        lo = {std::min(lo.x, pts[e].x), std::min(lo.y, pts[e].y)};
        hi = {std::max(hi.x, pts[e].x), std::max(hi.y, pts[e].y)};
    }

    // Fixed chunks with independent streams, merged in chunk order, so the
    // estimate does not depend on the worker count.
    const std::size_t chunks = (mc_samples + kChunk - 1) / kChunk;
    std::vector<double> chunk_sum(chunks), chunk_sq(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        std::seed_seq seq{static_cast<std::uint32_t>(*rng_seed), static_cast<std::uint32_t>(*rng_seed >> 32),
                          static_cast<std::uint32_t>(c)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
        std::vector<double> angles(n);
        const std::size_t quota = std::min(kChunk, mc_samples - c * kChunk);
        NeumaierSum sum, sq;
        for (std::size_t k = 0; k < quota;) {
            const Vec2 x{ux(rng), uy(rng)};
            if (!contains(curve, x)) continue;
            const double j = inner_integral(edges, normals, x, s, angles);
            sum.add(j);
            sq.add(j * j);
            ++k;
        }
        chunk_sum[c] = sum.value();
        chunk_sq[c] = sq.value();
    });
    NeumaierSum sum, sq;
    for (std::size_t c = 0; c < chunks; ++c) {
        sum.add(chunk_sum[c]);
        sq.add(chunk_sq[c]);
    }
    const double m = static_cast<double>(mc_samples);
    const double mean = sum.value() / m;
    const double var = std::max(0.0, (sq.value() / m - mean * mean) * m / (m - 1.0));
    const double scale = s * (1.0 - s) * enclosed_area(curve);
    return {scale * mean, scale * std::sqrt(var / m), mc_samples};
}

}  // namespace fracflow
