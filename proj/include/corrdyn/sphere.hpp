#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace corrdyn {

using Complex = std::complex<double>;

/// A point of the Riemann sphere in homogeneous coordinates [h0 : h1].
/// Stored canonically: the larger-modulus coordinate is scaled to exactly
/// 1 + 0i (ties prefer h1, so finite points read as [z : 1] with |z| <= 1).
/// Equality of points is therefore a chordal-distance test, not bitwise.
struct P1Point {
    Complex h0{0.0, 0.0};
    Complex h1{1.0, 0.0};
};

inline constexpr double kPointMergeTol = 1e-9; // chordal tolerance for point identity

/// Builds a normalized point; throws std::invalid_argument if both
/// coordinates vanish.
P1Point make_point(Complex h0, Complex h1);

P1Point affine_point(Complex z);
P1Point infinity_point();

inline bool is_infinity(const P1Point& p) { return p.h1 == Complex{0.0, 0.0}; }

struct AffineValue {
    bool is_infinity = false;
    Complex value{0.0, 0.0};
};

AffineValue project_affine(const P1Point& p);

/// Chordal metric normalized so antipodal points are at distance 1.
/// In the affine chart: |z - w| / sqrt((1+|z|^2)(1+|w|^2)).
double chordal_distance(const P1Point& p, const P1Point& q);

inline bool points_equal(const P1Point& p, const P1Point& q, double tol = kPointMergeTol) {
    return chordal_distance(p, q) <= tol;
}

using PointSet = std::vector<P1Point>;

/// Max pairwise chordal distance; 0 for a singleton. Throws on empty input.
double diameter(std::span<const P1Point> points);

/// Deterministic, approximately area-uniform sphere point: two independent
/// complex Gaussians as homogeneous coordinates, drawn from splitmix64(seed).
P1Point random_point(std::uint64_t seed);

/// Unit-sphere embedding (x, y, z) with the unit circle on the equator and
/// infinity at the north pole.
struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

Vec3 sphere_coords(const P1Point& p);

} // namespace corrdyn
