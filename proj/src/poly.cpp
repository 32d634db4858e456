#include "corrdyn/poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace corrdyn {

namespace {

double max_modulus(const std::vector<Complex>& c) {
    double m = 0.0;
    for (const Complex& v : c) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

ComplexPoly make_poly(std::vector<Complex> coeffs, double trim_rel) {
    if (coeffs.empty()) coeffs.push_back(Complex{0.0, 0.0});
    const double m = max_modulus(coeffs);
    if (m == 0.0) return ComplexPoly{{Complex{0.0, 0.0}}, 0.0};
    while (coeffs.size() > 1 && std::abs(coeffs.back()) <= trim_rel * m)
        coeffs.pop_back();
    const double top = max_modulus(coeffs);
    for (Complex& v : coeffs) v /= top;
    return ComplexPoly{std::move(coeffs), top};
}

ComplexPoly poly_constant(Complex c) { return make_poly({c}); }

EvalResult poly_eval_derive(const ComplexPoly& p, Complex z) {
    Complex v{0.0, 0.0};
    Complex d{0.0, 0.0};
    for (int k = p.degree(); k >= 0; --k) {
        d = d * z + v;
        v = v * z + p.coeffs[static_cast<std::size_t>(k)];
    }
    return EvalResult{v * p.scale, d * p.scale};
}

ComplexPoly poly_mul(const ComplexPoly& a, const ComplexPoly& b) {
    if (a.is_zero() || b.is_zero()) return ComplexPoly{{Complex{0.0, 0.0}}, 0.0};
    std::vector<Complex> out(a.coeffs.size() + b.coeffs.size() - 1, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs.size(); ++j)
            out[i + j] += a.coeffs[i] * b.coeffs[j];
    ComplexPoly r = make_poly(std::move(out));
    r.scale *= a.scale * b.scale;
    return r;
}

ComplexPoly poly_add(const ComplexPoly& a, const ComplexPoly& b) {
    std::vector<Complex> out(std::max(a.coeffs.size(), b.coeffs.size()), Complex{0.0, 0.0});
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) out[i] += a.coeffs[i] * a.scale;
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) out[i] += b.coeffs[i] * b.scale;
    return make_poly(std::move(out));
}

ComplexPoly poly_scale(const ComplexPoly& a, Complex factor) {
    if (factor == Complex{0.0, 0.0} || a.is_zero())
        return ComplexPoly{{Complex{0.0, 0.0}}, 0.0};
    std::vector<Complex> out = a.coeffs;
    const double m = std::abs(factor);
    const Complex phase = factor / m;
    for (Complex& v : out) v *= phase;
    ComplexPoly r{std::move(out), a.scale * m};
    return r;
}

ComplexPoly poly_derivative(const ComplexPoly& p) {
    if (p.degree() == 0) return ComplexPoly{{Complex{0.0, 0.0}}, 0.0};
    std::vector<Complex> out(p.coeffs.size() - 1);
    for (std::size_t k = 1; k < p.coeffs.size(); ++k)
        out[k - 1] = p.coeffs[k] * static_cast<double>(k);
    ComplexPoly r = make_poly(std::move(out));
    r.scale *= p.scale;
    return r;
}

ComplexPoly poly_deflate(const ComplexPoly& p, Complex root) {
    const int n = p.degree();
    if (n < 1) throw std::invalid_argument("poly_deflate: constant polynomial");
    std::vector<Complex> out(static_cast<std::size_t>(n));
    Complex carry = p.coeffs.back();
    for (int k = n - 1; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = carry;
        carry = p.coeffs[static_cast<std::size_t>(k)] + root * carry;
    }
    ComplexPoly r = make_poly(std::move(out));
    r.scale *= p.scale;
    return r;
}

int RootSet::total_multiplicity() const {
    int total = 0;
    for (const RootEntry& r : roots) total += r.multiplicity;
    return total;
}

namespace {

// One Aberth-Ehrlich sweep; returns the largest correction applied.
double aberth_sweep(const ComplexPoly& p, std::vector<Complex>& z) {
    const std::size_t n = z.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const EvalResult e = poly_eval_derive(p, z[i]);
        if (e.value == Complex{0.0, 0.0}) continue;
        Complex repulsion{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const Complex diff = z[i] - z[j];
            if (std::abs(diff) < 1e-300) continue;
            repulsion += 1.0 / diff;
        }
        if (e.derivative == Complex{0.0, 0.0}) {
            // Exactly at a critical point; nudge off it.
            z[i] += Complex{1e-8, 1e-8} * (1.0 + std::abs(z[i]));
            worst = std::max(worst, 1e-8);
            continue;
        }
        const Complex newton = e.value / e.derivative;
        const Complex denom = 1.0 - newton * repulsion;
        Complex step = (std::abs(denom) < 1e-300) ? newton : newton / denom;
        // Damp wild steps far from the cluster scale.
        const double cap = 2.0 * (1.0 + std::abs(z[i]));
        const double sm = std::abs(step);
        if (sm > cap) step *= cap / sm;
        z[i] -= step;
        worst = std::max(worst, std::abs(step) / (1.0 + std::abs(z[i])));
    }
    return worst;
}

double chordal_affine(Complex a, Complex b) {
    return std::abs(a - b) / std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
}

} // namespace

RootSet poly_roots(const ComplexPoly& p, double cluster_tol) {
    if (p.is_zero()) throw std::invalid_argument("poly_roots: zero polynomial");
    if (p.degree() < 1) throw std::invalid_argument("poly_roots: degree 0 input");

    // Exact roots at the origin come off first (trailing zero coefficients);
    // they are frequent under preimages of critical values and deserve exact
    // multiplicity.
    ComplexPoly work = p;
    int zero_mult = 0;
    {
        // coefficients are normalized to max modulus 1
        std::size_t k = 0;
        while (k + 1 < work.coeffs.size() && std::abs(work.coeffs[k]) <= 1e-14) ++k;
        if (k > 0) {
            zero_mult = static_cast<int>(k);
            std::vector<Complex> rest(work.coeffs.begin() + static_cast<long>(k),
                                      work.coeffs.end());
            const double s = work.scale;
            work = make_poly(std::move(rest));
            work.scale *= s;
        }
    }

    const int n = work.degree();
    std::vector<Complex> z;
    bool converged = true;

    if (n >= 1) {
        // Perturbed-circle initialization: radius from the Cauchy bound,
        // angles offset by a fixed irrational twist so symmetric polynomials
        // do not trap the iteration on a symmetry axis.
        const Complex lead = work.coeffs.back();
        double radius = 0.0;
        for (int k = 0; k < n; ++k)
            radius = std::max(radius,
                              std::abs(work.coeffs[static_cast<std::size_t>(k)] / lead));
        radius = 1.0 + radius;
        radius = std::min(radius, 1e12);
        z.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double a =
                2.0 * M_PI * (static_cast<double>(i) + 0.3819660112501051) /
                    static_cast<double>(n) +
                0.7548776662466927;
            const double r = radius * (1.0 + 0.05 * std::cos(7.0 * a));
            z[static_cast<std::size_t>(i)] = Complex{r * std::cos(a), r * std::sin(a)};
        }

        const int max_sweeps = 220;
        int sweep = 0;
        for (; sweep < max_sweeps; ++sweep) {
            const double worst = aberth_sweep(work, z);
            if (worst < 1e-14) break;
        }
        converged = sweep < max_sweeps;

        // Newton polish, kept only when it does not make the residual worse.
        for (Complex& zi : z) {
            for (int it = 0; it < 3; ++it) {
                const EvalResult e = poly_eval_derive(work, zi);
                if (e.derivative == Complex{0.0, 0.0}) break;
                const Complex step = e.value / e.derivative;
                const Complex cand = zi - step;
                if (std::abs(poly_eval_derive(work, cand).value) <= std::abs(e.value))
                    zi = cand;
                else
                    break;
            }
        }
    }

    // Cluster by chordal proximity (union-find over close pairs), so
    // numerically split multiple roots report a single entry.
    const std::size_t total = z.size();
    std::vector<std::size_t> parent(total);
    for (std::size_t i = 0; i < total; ++i) parent[i] = i;
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i + 1 < total; ++i)
        for (std::size_t j = i + 1; j < total; ++j)
            if (chordal_affine(z[i], z[j]) <= cluster_tol) parent[find(i)] = find(j);

    RootSet out;
    if (zero_mult > 0) out.roots.push_back(RootEntry{Complex{0.0, 0.0}, zero_mult});
    std::vector<bool> done(total, false);
    for (std::size_t i = 0; i < total; ++i) {
        if (done[i]) continue;
        const std::size_t rep = find(i);
        Complex centroid{0.0, 0.0};
        int mult = 0;
        for (std::size_t j = 0; j < total; ++j) {
            if (find(j) == rep) {
                centroid += z[j];
                ++mult;
                done[j] = true;
            }
        }
        centroid /= static_cast<double>(mult);
        out.roots.push_back(RootEntry{centroid, mult});
    }
    std::sort(out.roots.begin(), out.roots.end(), [](const RootEntry& a, const RootEntry& b) {
        if (a.location.real() != b.location.real())
            return a.location.real() < b.location.real();
        return a.location.imag() < b.location.imag();
    });

    double residual = 0.0;
    for (const RootEntry& r : out.roots)
        residual = std::max(residual, std::abs(poly_eval_derive(work, r.location).value));
    out.residual = residual; // work.scale == p.scale; eval already includes it
    out.converged = converged;
    return out;
}

} // namespace corrdyn
