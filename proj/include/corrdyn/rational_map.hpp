#pragma once

#include <vector>

#include "corrdyn/poly.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

inline constexpr double kCommonRootTol = 1e-7; // chordal tolerance for num/den reduction
inline constexpr int kDefaultDegreeCap = 512;
inline constexpr double kRepellingThreshold = 1.0 + 1e-9;

/// Rational self-map of P^1 written as a pair of affine polynomials that
/// homogenize to a common degree d >= 1. The pair is kept reduced: no shared
/// root within chordal tolerance. Relative scale between num and den matters
/// (the map is num/den), so both polys keep their own scale factors.
struct RationalMap {
    ComplexPoly num;
    ComplexPoly den;
    int degree = 1;
};

/// Builds a reduced map. Shared roots of num and den within `kCommonRootTol`
/// are deflated from both sides. Throws std::invalid_argument when the pair
/// reduces to a constant map.
RationalMap make_rational_map(const ComplexPoly& num, const ComplexPoly& den);

RationalMap power_map(int d);     // z -> z^d, d >= 1
RationalMap affine_map(Complex a, Complex b); // z -> a z + b
RationalMap polynomial_map(std::vector<Complex> coeffs);

/// Möbius rotation of the sphere determined by the unitary matrix
/// [[m00 m01],[m10 m11]]; callers are expected to pass a (near-)unitary one.
RationalMap mobius_from_matrix(Complex m00, Complex m01, Complex m10, Complex m11);

/// Rotation of the sphere sending p to infinity, and its inverse.
RationalMap rotation_to_infinity(const P1Point& p);
RationalMap rotation_from_infinity(const P1Point& p);
/// Rotation sending p to the origin, and its inverse.
RationalMap rotation_to_zero(const P1Point& p);
RationalMap rotation_from_zero(const P1Point& p);

P1Point evaluate(const RationalMap& g, const P1Point& p);

/// f after g (apply g first). Reduced; throws CapExceeded when the product
/// degree exceeds `degree_cap`.
RationalMap compose_maps(const RationalMap& f, const RationalMap& g,
                         int degree_cap = kDefaultDegreeCap);

struct Preimage {
    P1Point point;
    int multiplicity = 1;
};

/// The deg(g) preimages of q, counted with multiplicity (including infinity).
std::vector<Preimage> preimages(const RationalMap& g, const P1Point& q);

struct FixedPoint {
    P1Point point;
    int multiplicity = 1;
    double multiplier = 0.0; // spherical multiplier
};

/// All deg(g)+1 fixed points with multiplicity (Bezout on P^1 x P^1) and
/// their spherical multipliers.
std::vector<FixedPoint> fixed_points(const RationalMap& g);

/// Magnitude of the derivative in the spherical metric, computed chart-free
/// from the homogeneous Jacobian: |P_a Q_b - P_b Q_a| ||v||^2 / (d ||G(v)||^2).
/// Finite at poles and at infinity; coincides with |g'| at fixed points.
double spherical_multiplier(const RationalMap& g, const P1Point& p);

/// Derivative modulus |g'(z)| in the affine chart; throws NumericalError if
/// p or g(p) is at (or numerically near) infinity.
double affine_derivative(const RationalMap& g, const P1Point& p);

/// Images of the critical points (Wronskian roots, 2d-2 of them with
/// multiplicity), deduplicated chordally. Empty for Möbius maps.
PointSet critical_values(const RationalMap& g);
PointSet critical_points(const RationalMap& g);

bool maps_equal(const RationalMap& a, const RationalMap& b, double tol = 1e-9);

} // namespace corrdyn
