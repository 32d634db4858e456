#include "corrdyn/sphere.hpp"

#include <cmath>
#include <stdexcept>

#include "corrdyn/rng.hpp"

namespace corrdyn {

P1Point make_point(Complex h0, Complex h1) {
    const double m0 = std::abs(h0);
    const double m1 = std::abs(h1);
    if (m0 == 0.0 && m1 == 0.0)
        throw std::invalid_argument("P1Point: both homogeneous coordinates are zero");
    if (!std::isfinite(m0) || !std::isfinite(m1))
        throw std::invalid_argument("P1Point: non-finite homogeneous coordinate");
    // Divide by the larger coordinate; it becomes exactly 1 and the other has
    // modulus <= 1. Ties prefer h1 so finite representatives are [z : 1].
    if (m1 >= m0) {
        return P1Point{h0 / h1, Complex{1.0, 0.0}};
    }
    return P1Point{Complex{1.0, 0.0}, h1 / h0};
}

P1Point affine_point(Complex z) {
    if (!std::isfinite(std::abs(z)))
        return infinity_point();
    return make_point(z, Complex{1.0, 0.0});
}

P1Point infinity_point() { return P1Point{Complex{1.0, 0.0}, Complex{0.0, 0.0}}; }

AffineValue project_affine(const P1Point& p) {
    if (is_infinity(p)) return AffineValue{true, Complex{0.0, 0.0}};
    return AffineValue{false, p.h0 / p.h1};
}

double chordal_distance(const P1Point& p, const P1Point& q) {
    // |p0 q1 - p1 q0| / (||p|| ||q||); coordinates are pre-normalized so the
    // norms are between 1 and sqrt(2).
    const double num = std::abs(p.h0 * q.h1 - p.h1 * q.h0);
    const double np = std::sqrt(std::norm(p.h0) + std::norm(p.h1));
    const double nq = std::sqrt(std::norm(q.h0) + std::norm(q.h1));
    const double d = num / (np * nq);
    return d > 1.0 ? 1.0 : d;
}

double diameter(std::span<const P1Point> points) {
    if (points.empty()) throw std::invalid_argument("diameter: empty point set");
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            best = std::max(best, chordal_distance(points[i], points[j]));
    return best;
}

P1Point random_point(std::uint64_t seed) {
    SplitMix64 rng(seed);
    for (;;) {
        const Complex h0 = rng.next_complex_gaussian();
        const Complex h1 = rng.next_complex_gaussian();
        if (std::abs(h0) == 0.0 && std::abs(h1) == 0.0) continue;
        return make_point(h0, h1);
    }
}

Vec3 sphere_coords(const P1Point& p) {
    const double n = std::norm(p.h0) + std::norm(p.h1);
    const Complex cross = p.h0 * std::conj(p.h1);
    return Vec3{2.0 * cross.real() / n, 2.0 * cross.imag() / n,
                (std::norm(p.h0) - std::norm(p.h1)) / n};
}

} // namespace corrdyn
