#include "corrdyn/rational_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "corrdyn/errors.hpp"

namespace corrdyn {

namespace {

// H(v) = scale * sum_k c_k h0^k h1^(d-k): the affine coefficients c, padded
// with zeros up to homogeneous degree d. Relies on the canonical point
// normalization (the larger-modulus coordinate is exactly 1), which keeps
// every power bounded by 1 in modulus.
Complex eval_homog(const std::vector<Complex>& c, double scale, int d, const P1Point& v) {
    const int n = static_cast<int>(c.size()) - 1;
    if (v.h1 == Complex{1.0, 0.0}) {
        Complex acc{0.0, 0.0};
        for (int k = n; k >= 0; --k) acc = acc * v.h0 + c[static_cast<std::size_t>(k)];
        return acc * scale;
    }
    // h0 == 1: H = h1^(d-n) * sum_k c_k h1^(n-k), reversed Horner.
    Complex acc{0.0, 0.0};
    for (int k = 0; k <= n; ++k) acc = acc * v.h1 + c[static_cast<std::size_t>(k)];
    for (int j = 0; j < d - n; ++j) acc *= v.h1;
    return acc * scale;
}

P1Point canonical(const P1Point& p) {
    if (p.h1 == Complex{1.0, 0.0} || p.h0 == Complex{1.0, 0.0}) return p;
    return make_point(p.h0, p.h1);
}

// d/dh0 of the homogeneous form: coefficients k*c_k, degree d-1.
std::vector<Complex> d_dh0(const std::vector<Complex>& c) {
    if (c.size() <= 1) return {Complex{0.0, 0.0}};
    std::vector<Complex> out(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k)
        out[k - 1] = c[k] * static_cast<double>(k);
    return out;
}

// d/dh1 of the homogeneous form: coefficients (d-k)*c_k, degree d-1.
std::vector<Complex> d_dh1(const std::vector<Complex>& c, int d) {
    std::vector<Complex> out(c.size());
    for (std::size_t k = 0; k < c.size(); ++k)
        out[k] = c[k] * static_cast<double>(d - static_cast<int>(k));
    while (out.size() > 1 && out.back() == Complex{0.0, 0.0}) out.pop_back();
    return out;
}

// Rebalance the two scale factors projectively so the larger is 1. The map
// [P : Q] is unchanged and deep compositions cannot push scales toward
// overflow.
void rebalance(RationalMap& g) {
    const double m = std::max(g.num.scale, g.den.scale);
    if (m > 0.0) {
        g.num.scale /= m;
        g.den.scale /= m;
    }
}

ComplexPoly poly_sub(const ComplexPoly& a, const ComplexPoly& b) {
    return poly_add(a, poly_scale(b, Complex{-1.0, 0.0}));
}

// Deflate shared roots of num and den (the numerical gcd step after
// composition). Each side is deflated at its own accurate root.
void reduce_pair(ComplexPoly& num, ComplexPoly& den) {
    if (num.degree() < 1 || den.degree() < 1) return;
    RootSet rn = poly_roots(num, kCommonRootTol);
    RootSet rd = poly_roots(den, kCommonRootTol);
    for (const RootEntry& a : rn.roots) {
        for (const RootEntry& b : rd.roots) {
            const double dist =
                chordal_distance(affine_point(a.location), affine_point(b.location));
            if (dist <= kCommonRootTol) {
                const int count = std::min(a.multiplicity, b.multiplicity);
                for (int i = 0; i < count; ++i) {
                    num = poly_deflate(num, a.location);
                    den = poly_deflate(den, b.location);
                }
            }
        }
    }
}

} // namespace

RationalMap make_rational_map(const ComplexPoly& num_in, const ComplexPoly& den_in) {
    if (num_in.is_zero() || den_in.is_zero())
        throw std::invalid_argument("rational map: numerator or denominator is zero");
    ComplexPoly num = num_in;
    ComplexPoly den = den_in;
    reduce_pair(num, den);
    const int d = std::max(num.degree(), den.degree());
    if (d < 1)
        throw std::invalid_argument("rational map: constant map (degree 0)");
    RationalMap g{std::move(num), std::move(den), d};
    rebalance(g);
    return g;
}

RationalMap power_map(int d) {
    if (d < 1) throw std::invalid_argument("power_map: degree must be >= 1");
    std::vector<Complex> c(static_cast<std::size_t>(d) + 1, Complex{0.0, 0.0});
    c.back() = Complex{1.0, 0.0};
    return make_rational_map(make_poly(std::move(c)), poly_constant(Complex{1.0, 0.0}));
}

RationalMap affine_map(Complex a, Complex b) {
    if (a == Complex{0.0, 0.0}) throw std::invalid_argument("affine_map: zero slope");
    return make_rational_map(make_poly({b, a}), poly_constant(Complex{1.0, 0.0}));
}

RationalMap polynomial_map(std::vector<Complex> coeffs) {
    return make_rational_map(make_poly(std::move(coeffs)), poly_constant(Complex{1.0, 0.0}));
}

RationalMap mobius_from_matrix(Complex m00, Complex m01, Complex m10, Complex m11) {
    return make_rational_map(make_poly({m01, m00}), make_poly({m11, m10}));
}

RationalMap rotation_to_infinity(const P1Point& p) {
    const Complex a = p.h0, b = p.h1;
    return mobius_from_matrix(std::conj(a), std::conj(b), b, -a);
}

RationalMap rotation_from_infinity(const P1Point& p) {
    // adjugate of the rotation_to_infinity matrix
    const Complex a = p.h0, b = p.h1;
    return mobius_from_matrix(-a, -std::conj(b), -b, std::conj(a));
}

RationalMap rotation_to_zero(const P1Point& p) {
    const Complex a = p.h0, b = p.h1;
    return mobius_from_matrix(b, -a, std::conj(a), std::conj(b));
}

RationalMap rotation_from_zero(const P1Point& p) {
    const Complex a = p.h0, b = p.h1;
    return mobius_from_matrix(std::conj(b), a, -std::conj(a), b);
}

P1Point evaluate(const RationalMap& g, const P1Point& p) {
    const P1Point v = canonical(p);
    const Complex u = eval_homog(g.num.coeffs, g.num.scale, g.degree, v);
    const Complex w = eval_homog(g.den.coeffs, g.den.scale, g.degree, v);
    const double m = std::max(std::abs(u), std::abs(w));
    if (m <= 1e-12 * (g.num.scale + g.den.scale))
        throw NumericalError("evaluate: 0/0 value, map pair looks unreduced");
    return make_point(u, w);
}

RationalMap compose_maps(const RationalMap& f, const RationalMap& g, int degree_cap) {
    const long long target =
        static_cast<long long>(f.degree) * static_cast<long long>(g.degree);
    if (target > degree_cap)
        throw CapExceeded("compose_maps: degree " + std::to_string(target) +
                          " exceeds cap " + std::to_string(degree_cap));

    // P_c(z,1) = sum_k pf_k * num_g(z)^k * den_g(z)^(df-k), pf padded to df.
    const int df = f.degree;
    std::vector<ComplexPoly> num_pow(static_cast<std::size_t>(df) + 1);
    std::vector<ComplexPoly> den_pow(static_cast<std::size_t>(df) + 1);
    num_pow[0] = poly_constant(Complex{1.0, 0.0});
    den_pow[0] = poly_constant(Complex{1.0, 0.0});
    for (int k = 1; k <= df; ++k) {
        num_pow[static_cast<std::size_t>(k)] =
            poly_mul(num_pow[static_cast<std::size_t>(k - 1)], g.num);
        den_pow[static_cast<std::size_t>(k)] =
            poly_mul(den_pow[static_cast<std::size_t>(k - 1)], g.den);
    }
    auto substitute = [&](const ComplexPoly& outer) {
        ComplexPoly acc{{Complex{0.0, 0.0}}, 0.0};
        for (int k = 0; k <= df; ++k) {
            const Complex ck = k <= outer.degree()
                                   ? outer.coeffs[static_cast<std::size_t>(k)]
                                   : Complex{0.0, 0.0};
            if (ck == Complex{0.0, 0.0}) continue;
            ComplexPoly term = poly_mul(num_pow[static_cast<std::size_t>(k)],
                                        den_pow[static_cast<std::size_t>(df - k)]);
            term = poly_scale(term, ck * outer.scale);
            acc = poly_add(acc, term);
        }
        return acc;
    };
    ComplexPoly num_c = substitute(f.num);
    ComplexPoly den_c = substitute(f.den);
    return make_rational_map(num_c, den_c);
}

std::vector<Preimage> preimages(const RationalMap& g, const P1Point& q) {
    const P1Point t = canonical(q);
    const int d = g.degree;
    // roots of b*P(z,w) - a*Q(z,w) for q = [a : b], in the chart w = 1
    std::vector<Complex> h(static_cast<std::size_t>(d) + 1, Complex{0.0, 0.0});
    for (int k = 0; k <= d; ++k) {
        Complex v{0.0, 0.0};
        if (k <= g.num.degree())
            v += t.h1 * g.num.coeffs[static_cast<std::size_t>(k)] * g.num.scale;
        if (k <= g.den.degree())
            v -= t.h0 * g.den.coeffs[static_cast<std::size_t>(k)] * g.den.scale;
        h[static_cast<std::size_t>(k)] = v;
    }
    ComplexPoly form = make_poly(std::move(h));
    if (form.is_zero())
        throw NumericalError("preimages: degenerate target (map looks constant)");

    std::vector<Preimage> out;
    const int affine_deg = form.degree();
    if (affine_deg >= 1) {
        RootSet roots = poly_roots(form);
        if (roots.residual > 1e-6 * form.scale)
            throw NumericalError("preimages: root finder residual too large");
        for (const RootEntry& r : roots.roots)
            out.push_back(Preimage{affine_point(r.location), r.multiplicity});
    }
    if (affine_deg < d)
        out.push_back(Preimage{infinity_point(), d - affine_deg});
    return out;
}

std::vector<FixedPoint> fixed_points(const RationalMap& g) {
    const int d = g.degree;
    // h1*P(z,w) - h0*Q(z,w) on the diagonal: w P(z,w) - z Q(z,w), degree d+1
    std::vector<Complex> h(static_cast<std::size_t>(d) + 2, Complex{0.0, 0.0});
    for (int k = 0; k <= d + 1; ++k) {
        Complex v{0.0, 0.0};
        if (k <= g.num.degree())
            v += g.num.coeffs[static_cast<std::size_t>(k)] * g.num.scale;
        if (k >= 1 && k - 1 <= g.den.degree())
            v -= g.den.coeffs[static_cast<std::size_t>(k - 1)] * g.den.scale;
        h[static_cast<std::size_t>(k)] = v;
    }
    ComplexPoly form = make_poly(std::move(h));
    if (form.is_zero())
        throw NumericalError("fixed_points: identity map has no isolated fixed points");

    std::vector<FixedPoint> out;
    const int affine_deg = form.degree();
    if (affine_deg >= 1) {
        RootSet roots = poly_roots(form);
        if (roots.residual > 1e-6 * form.scale)
            throw NumericalError("fixed_points: root finder residual too large");
        for (const RootEntry& r : roots.roots) {
            const P1Point p = affine_point(r.location);
            out.push_back(FixedPoint{p, r.multiplicity, spherical_multiplier(g, p)});
        }
    }
    if (affine_deg < d + 1)
        out.push_back(FixedPoint{infinity_point(), d + 1 - affine_deg,
                                 spherical_multiplier(g, infinity_point())});

    // At a finite fixed point away from poles the spherical and affine
    // multipliers coincide; a gross mismatch means the solver and the map
    // disagree about the point.
    for (const FixedPoint& fp : out) {
        if (is_infinity(fp.point)) continue;
        const AffineValue z = project_affine(fp.point);
        if (std::abs(z.value) > 1e6) continue;
        const EvalResult dv = poly_eval_derive(g.den, z.value);
        if (std::abs(dv.value) < 1e-9 * g.den.scale) continue; // pole-adjacent, skip
        const double aff = affine_derivative(g, fp.point);
        if (std::abs(aff - fp.multiplier) > 1e-6 * std::max(1.0, aff))
            throw NumericalError("fixed_points: affine/spherical multiplier mismatch");
    }
    return out;
}

double spherical_multiplier(const RationalMap& g, const P1Point& p) {
    const P1Point v = canonical(p);
    const int d = g.degree;
    const std::vector<Complex> pa = d_dh0(g.num.coeffs);
    const std::vector<Complex> pb = d_dh1(g.num.coeffs, d);
    const std::vector<Complex> qa = d_dh0(g.den.coeffs);
    const std::vector<Complex> qb = d_dh1(g.den.coeffs, d);

    const Complex Pa = eval_homog(pa, g.num.scale, d - 1, v);
    const Complex Pb = eval_homog(pb, g.num.scale, d - 1, v);
    const Complex Qa = eval_homog(qa, g.den.scale, d - 1, v);
    const Complex Qb = eval_homog(qb, g.den.scale, d - 1, v);
    const Complex P = eval_homog(g.num.coeffs, g.num.scale, d, v);
    const Complex Q = eval_homog(g.den.coeffs, g.den.scale, d, v);

    const double jac = std::abs(Pa * Qb - Pb * Qa);
    const double nv = std::norm(v.h0) + std::norm(v.h1);
    const double ng = std::norm(P) + std::norm(Q);
    if (ng == 0.0)
        throw NumericalError("spherical_multiplier: map vanishes on both coordinates");
    return jac * nv / (static_cast<double>(d) * ng);
}

double affine_derivative(const RationalMap& g, const P1Point& p) {
    if (is_infinity(p))
        throw NumericalError("affine_derivative: point at infinity");
    const Complex z = project_affine(p).value;
    const EvalResult n = poly_eval_derive(g.num, z);
    const EvalResult q = poly_eval_derive(g.den, z);
    const Complex w = n.derivative * q.value - n.value * q.derivative;
    const double qq = std::norm(q.value);
    if (qq == 0.0) throw NumericalError("affine_derivative: pole at sample point");
    return std::abs(w) / qq;
}

PointSet critical_points(const RationalMap& g) {
    const int d = g.degree;
    if (d == 1) return {};
    ComplexPoly w = poly_sub(poly_mul(poly_derivative(g.num), g.den),
                             poly_mul(g.num, poly_derivative(g.den)));
    if (w.is_zero())
        throw NumericalError("critical_points: vanishing Wronskian (constant map?)");
    PointSet out;
    const int target = 2 * d - 2;
    const int affine_deg = w.degree();
    if (affine_deg >= 1) {
        RootSet roots = poly_roots(w);
        for (const RootEntry& r : roots.roots) {
            const P1Point p = affine_point(r.location);
            bool known = false;
            for (const P1Point& q : out)
                if (points_equal(p, q, kCommonRootTol)) { known = true; break; }
            if (!known) out.push_back(p);
        }
    }
    if (affine_deg < target) out.push_back(infinity_point());
    return out;
}

PointSet critical_values(const RationalMap& g) {
    PointSet out;
    for (const P1Point& c : critical_points(g)) {
        const P1Point v = evaluate(g, c);
        bool known = false;
        for (const P1Point& q : out)
            if (points_equal(v, q, kCommonRootTol)) { known = true; break; }
        if (!known) out.push_back(v);
    }
    return out;
}

bool maps_equal(const RationalMap& a, const RationalMap& b, double tol) {
    if (a.degree != b.degree) return false;
    const int d = a.degree;
    auto flatten = [d](const RationalMap& g) {
        std::vector<Complex> v(2 * (static_cast<std::size_t>(d) + 1), Complex{0.0, 0.0});
        for (int k = 0; k <= g.num.degree(); ++k)
            v[static_cast<std::size_t>(k)] =
                g.num.coeffs[static_cast<std::size_t>(k)] * g.num.scale;
        for (int k = 0; k <= g.den.degree(); ++k)
            v[static_cast<std::size_t>(d) + 1 + static_cast<std::size_t>(k)] =
                g.den.coeffs[static_cast<std::size_t>(k)] * g.den.scale;
        return v;
    };
    std::vector<Complex> va = flatten(a);
    std::vector<Complex> vb = flatten(b);
    // Canonical phase: divide both vectors by their entry at the pivot index,
    // the pivot chosen as the largest entry of a.
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < va.size(); ++i)
        if (std::abs(va[i]) > std::abs(va[pivot])) pivot = i;
    if (std::abs(va[pivot]) == 0.0 || std::abs(vb[pivot]) == 0.0) return false;
    const Complex ca = va[pivot];
    const Complex cb = vb[pivot];
    for (std::size_t i = 0; i < va.size(); ++i)
        if (std::abs(va[i] / ca - vb[i] / cb) > tol) return false;
    return true;
}

} // namespace corrdyn
