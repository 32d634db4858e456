#pragma once

#include <vector>

#include "corrdyn/sphere.hpp"

namespace corrdyn {

/// Complex polynomial, ascending powers. Coefficients are kept normalized so
/// max |coeff| = 1; `scale` carries the factor that was divided out, so the
/// represented polynomial is scale * sum coeffs[k] z^k. Keeping coefficients
/// at unit magnitude is what lets deeply composed words stay inside double
/// range.
struct ComplexPoly {
    std::vector<Complex> coeffs{Complex{0.0, 0.0}};
    double scale = 1.0;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    bool is_zero() const { return coeffs.size() == 1 && coeffs[0] == Complex{0.0, 0.0}; }
};

/// Builds a normalized polynomial: trims leading coefficients below
/// `trim_rel` relative to the largest, then rescales to max modulus 1.
ComplexPoly make_poly(std::vector<Complex> coeffs, double trim_rel = 1e-12);

ComplexPoly poly_constant(Complex c);

struct EvalResult {
    Complex value{0.0, 0.0};
    Complex derivative{0.0, 0.0};
};

/// Horner value and first derivative, including the scale factor.
EvalResult poly_eval_derive(const ComplexPoly& p, Complex z);

ComplexPoly poly_mul(const ComplexPoly& a, const ComplexPoly& b);
ComplexPoly poly_add(const ComplexPoly& a, const ComplexPoly& b);
ComplexPoly poly_scale(const ComplexPoly& a, Complex factor);
ComplexPoly poly_derivative(const ComplexPoly& p);

/// Synthetic division by (z - root); the remainder is dropped.
ComplexPoly poly_deflate(const ComplexPoly& p, Complex root);

struct RootEntry {
    Complex location{0.0, 0.0};
    int multiplicity = 1;
};

struct RootSet {
    std::vector<RootEntry> roots;
    double residual = 0.0; // max |p(root)| over returned roots, in original scale
    bool converged = true;
    int total_multiplicity() const;
};

/// All complex roots by simultaneous (Aberth-Ehrlich) iteration from a
/// perturbed-circle start, Newton-polished. Roots closer than `cluster_tol`
/// in the chordal metric (after lifting to the sphere) are merged into one
/// entry at their centroid with summed multiplicity; multiple roots are
/// expected under preimages of critical values, so clustering is not
/// optional. Throws std::invalid_argument on degree < 1 input.
RootSet poly_roots(const ComplexPoly& p, double cluster_tol = 1e-6);

} // namespace corrdyn
