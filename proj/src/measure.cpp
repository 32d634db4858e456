#include "corrdyn/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "corrdyn/errors.hpp"
#include "corrdyn/parallel.hpp"
#include "corrdyn/rng.hpp"

namespace corrdyn {

namespace {

// Quantization cell of 4e-9 on the unit-sphere embedding: points within the
// merge tolerance (chordal 1e-9 = Euclidean 2e-9) are at most one cell apart
// on each axis.
constexpr double kCellSize = 4e-9;

std::uint64_t cell_key(std::int64_t x, std::int64_t y, std::int64_t z) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : {x, y, z}) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

void AtomicMeasure::add(const P1Point& p, double weight) {
    if (weight <= 0.0) return;
    const Vec3 v = sphere_coords(p);
    const std::int64_t cx = std::llround(v.x / kCellSize);
    const std::int64_t cy = std::llround(v.y / kCellSize);
    const std::int64_t cz = std::llround(v.z / kCellSize);
    for (std::int64_t dx = -1; dx <= 1; ++dx)
        for (std::int64_t dy = -1; dy <= 1; ++dy)
            for (std::int64_t dz = -1; dz <= 1; ++dz) {
                auto it = buckets_.find(cell_key(cx + dx, cy + dy, cz + dz));
                if (it == buckets_.end()) continue;
                for (std::uint32_t idx : it->second) {
                    if (points_equal(atoms_[idx].point, p)) {
                        atoms_[idx].weight += weight;
                        return;
                    }
                }
            }
    atoms_.push_back(WeightedAtom{p, weight});
    buckets_[cell_key(cx, cy, cz)].push_back(static_cast<std::uint32_t>(atoms_.size() - 1));
}

double AtomicMeasure::mass() const {
    double m = 0.0;
    for (const WeightedAtom& a : atoms_) m += a.weight;
    return m;
}

AtomicMeasure AtomicMeasure::dirac(const P1Point& p) {
    AtomicMeasure m;
    m.add(p, 1.0);
    return m;
}

AtomicMeasure pullback_exact(const Chain& c, const P1Point& w0, int n, std::size_t atom_cap) {
    if (n < 0) throw std::invalid_argument("pullback_exact: negative depth");
    if (n > 0 && !c.key_condition())
        throw std::invalid_argument("pullback_exact: requires d1 > d0");
    const double d1 = static_cast<double>(c.d1());

    AtomicMeasure current = AtomicMeasure::dirac(w0);
    for (int level = 0; level < n; ++level) {
        if (static_cast<double>(current.size()) * d1 > static_cast<double>(atom_cap))
            throw CapExceeded("pullback_exact: atom cap exceeded at level " +
                              std::to_string(level + 1));
        AtomicMeasure next;
        next.reserve(current.size() * static_cast<std::size_t>(d1));
        for (const WeightedAtom& atom : current.atoms()) {
            for (const ChainComponent& comp : c.components) {
                const double comp_factor = static_cast<double>(comp.mult) / d1;
                for (const Preimage& pre : preimages(comp.map, atom.point))
                    next.add(pre.point,
                             atom.weight * comp_factor * static_cast<double>(pre.multiplicity));
            }
        }
        current = std::move(next);
    }
    return current;
}

namespace {

// One backward step of a sampled orbit: component j with probability
// m_j deg(g_j) / d1, then a preimage proportional to its multiplicity.
P1Point backward_step(const Chain& c, const P1Point& x, SplitMix64& rng) {
    const double d1 = static_cast<double>(c.d1());
    double pick = rng.next_double() * d1;
    const ChainComponent* chosen = &c.components.back();
    for (const ChainComponent& comp : c.components) {
        pick -= static_cast<double>(comp.mult * comp.map.degree);
        if (pick < 0.0) {
            chosen = &comp;
            break;
        }
    }
    const std::vector<Preimage> pres = preimages(chosen->map, x);
    double pick2 = rng.next_double() * static_cast<double>(chosen->map.degree);
    for (const Preimage& pre : pres) {
        pick2 -= static_cast<double>(pre.multiplicity);
        if (pick2 < 0.0) return pre.point;
    }
    return pres.back().point;
}

} // namespace

AtomicMeasure pullback_sample(const Chain& c, const P1Point& w0, int n, std::size_t count,
                              std::uint64_t seed, unsigned workers) {
    if (!c.key_condition())
        throw std::invalid_argument("pullback_sample: requires d1 > d0");
    if (count == 0) throw std::invalid_argument("pullback_sample: zero samples");
    std::vector<P1Point> endpoints(count);
    parallel_for(count, workers, [&](std::size_t i) {
        SplitMix64 rng = derive_stream(seed, i);
        P1Point x = w0;
        for (int level = 0; level < n; ++level) x = backward_step(c, x, rng);
        endpoints[i] = x;
    });
    AtomicMeasure out;
    const double w = 1.0 / static_cast<double>(count);
    for (const P1Point& p : endpoints) out.add(p, w);
    return out;
}

namespace {

// Newton fall-back for words too deep to compose symbolically: solves
// w(z) = z from a sphere grid of seeds, evaluating the word by orbit
// composition. Finds repelling points without multiplicities.
std::vector<RepellingPoint> newton_grid_fixed_points(const Chain& c, const Word& word,
                                                     int grid_side) {
    std::vector<RepellingPoint> found;
    const int total = grid_side * grid_side;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int s = 0; s < total; ++s) {
        // Fibonacci sphere seed, projected to the affine chart.
        const double zc = 1.0 - 2.0 * (static_cast<double>(s) + 0.5) / total;
        const double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
        const double th = golden * static_cast<double>(s);
        if (std::abs(1.0 - zc) < 1e-12) continue;
        Complex z{r * std::cos(th) / (1.0 - zc), r * std::sin(th) / (1.0 - zc)};

        bool ok = true;
        for (int it = 0; it < 40; ++it) {
            // value and derivative of the word at z by the chain rule
            Complex x = z;
            Complex deriv{1.0, 0.0};
            for (int j : word.indices) {
                const RationalMap& g = c.components[static_cast<std::size_t>(j)].map;
                const EvalResult nu = poly_eval_derive(g.num, x);
                const EvalResult de = poly_eval_derive(g.den, x);
                if (std::norm(de.value) < 1e-240) { ok = false; break; }
                deriv *= (nu.derivative * de.value - nu.value * de.derivative) /
                         (de.value * de.value);
                x = nu.value / de.value;
                if (!std::isfinite(x.real()) || !std::isfinite(x.imag()) ||
                    std::abs(x) > 1e9) { ok = false; break; }
            }
            if (!ok) break;
            const Complex f = x - z;
            const Complex fp = deriv - 1.0;
            if (std::abs(fp) < 1e-14) { ok = false; break; }
            const Complex step = f / fp;
            z -= step;
            if (std::abs(step) <= 1e-13 * (1.0 + std::abs(z))) break;
        }
        if (!ok || !std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;

        const P1Point p = affine_point(z);
        const std::vector<P1Point> orbit = word_orbit(c, word, p);
        if (chordal_distance(orbit.back(), p) > 1e-8) continue;
        const double mult = word_multiplier(c, word, p);
        if (mult <= kRepellingThreshold) continue;
        bool known = false;
        for (const RepellingPoint& q : found)
            if (points_equal(p, q.point, 1e-7)) { known = true; break; }
        if (!known) found.push_back(RepellingPoint{p, word, mult, word.weight});
    }
    return found;
}

} // namespace

RepellingResult repelling_measure(const Chain& c, int n, long long word_cap, int degree_cap) {
    if (n < 1) throw std::invalid_argument("repelling_measure: n must be >= 1");
    if (c.max_degree() < 2)
        throw std::invalid_argument(
            "repelling_measure: needs a generator of degree >= 2");
    const std::vector<Word> words = enumerate_words(c, n, word_cap);
    const double d1n = std::pow(static_cast<double>(c.d1()), n);

    RepellingResult result;
    for (const Word& word : words) {
        long long word_degree = 1;
        for (int j : word.indices)
            word_degree *= c.components[static_cast<std::size_t>(j)].map.degree;

        if (word_degree <= degree_cap) {
            const RationalMap m = word_map(c, word, degree_cap);
            for (const FixedPoint& fp : fixed_points(m)) {
                result.bezout_total +=
                    word.weight * static_cast<long long>(fp.multiplicity);
                if (fp.multiplier > kRepellingThreshold) {
                    const long long w = word.weight * fp.multiplicity;
                    result.points.push_back(
                        RepellingPoint{fp.point, word, fp.multiplier, w});
                    result.measure.add(fp.point, static_cast<double>(w) / d1n);
                }
            }
        } else {
            result.exact = false;
            for (const RepellingPoint& rp : newton_grid_fixed_points(c, word, 200)) {
                result.points.push_back(rp);
                result.bezout_total += rp.weight;
                result.measure.add(rp.point, static_cast<double>(rp.weight) / d1n);
            }
        }
    }
    return result;
}

namespace {

// Fixed generic rotation applied before binning. Any constants with no
// special relation to the coordinate axes work; these keep the equator and
// the standard meridians transversal to every bin boundary.
struct BinRotation {
    double m[3][3];
    BinRotation() {
        const double a = 0.6180339887498949; // about x
        const double b = 1.3247179572447460; // about z
        const double ca = std::cos(a), sa = std::sin(a);
        const double cb = std::cos(b), sb = std::sin(b);
        // Rz(b) * Rx(a)
        m[0][0] = cb; m[0][1] = -sb * ca; m[0][2] = sb * sa;
        m[1][0] = sb; m[1][1] = cb * ca;  m[1][2] = -cb * sa;
        m[2][0] = 0.0; m[2][1] = sa;      m[2][2] = ca;
    }
};

const BinRotation kBinRotation;

} // namespace

int cube_sphere_bin(const P1Point& p, int grid) {
    const Vec3 v = sphere_coords(p);
    const double x = kBinRotation.m[0][0] * v.x + kBinRotation.m[0][1] * v.y +
                     kBinRotation.m[0][2] * v.z;
    const double y = kBinRotation.m[1][0] * v.x + kBinRotation.m[1][1] * v.y +
                     kBinRotation.m[1][2] * v.z;
    const double z = kBinRotation.m[2][0] * v.x + kBinRotation.m[2][1] * v.y +
                     kBinRotation.m[2][2] * v.z;
    const double ax = std::abs(x), ay = std::abs(y), az = std::abs(z);
    int face;
    double s, t, major;
    if (ax >= ay && ax >= az) {
        face = x >= 0.0 ? 0 : 1;
        major = ax; s = y; t = z;
    } else if (ay >= az) {
        face = y >= 0.0 ? 2 : 3;
        major = ay; s = x; t = z;
    } else {
        face = z >= 0.0 ? 4 : 5;
        major = az; s = x; t = y;
    }
    if (major == 0.0) major = 1.0;
    auto cell = [grid](double u) {
        int k = static_cast<int>(std::floor((u + 1.0) * 0.5 * grid));
        if (k < 0) k = 0;
        if (k >= grid) k = grid - 1;
        return k;
    };
    return face * grid * grid + cell(s / major) * grid + cell(t / major);
}

double binned_tv(const AtomicMeasure& a, const AtomicMeasure& b, int grid) {
    if (grid < 2) throw std::invalid_argument("binned_tv: grid must be >= 2");
    std::vector<double> bins(static_cast<std::size_t>(6 * grid * grid), 0.0);
    for (const WeightedAtom& atom : a.atoms())
        bins[static_cast<std::size_t>(cube_sphere_bin(atom.point, grid))] += atom.weight;
    for (const WeightedAtom& atom : b.atoms())
        bins[static_cast<std::size_t>(cube_sphere_bin(atom.point, grid))] -= atom.weight;
    double sum = 0.0;
    for (double d : bins) sum += std::abs(d);
    return 0.5 * sum;
}

namespace {

struct BranchLevels {
    std::vector<double> diam; // frame diameter per level, 0..depth
    bool ok = false;
};

BranchLevels track_branch(const Chain& c, const ShrinkProbeParams& params,
                          const std::vector<P1Point>& frame0, std::uint64_t branch_index) {
    BranchLevels out;
    SplitMix64 rng = derive_stream(params.seed, branch_index);
    std::vector<P1Point> frame = frame0; // last entry is the center
    out.diam.push_back(diameter(frame));
    const double d1 = static_cast<double>(c.d1());

    for (int level = 0; level < params.depth; ++level) {
        // component choice matches the sampling scheme
        double pick = rng.next_double() * d1;
        const ChainComponent* chosen = &c.components.back();
        for (const ChainComponent& comp : c.components) {
            pick -= static_cast<double>(comp.mult * comp.map.degree);
            if (pick < 0.0) { chosen = &comp; break; }
        }
        const std::vector<Preimage> center_pres = preimages(chosen->map, frame.back());
        double pick2 = rng.next_double() * static_cast<double>(chosen->map.degree);
        P1Point center_pre = center_pres.back().point;
        for (const Preimage& pre : center_pres) {
            pick2 -= static_cast<double>(pre.multiplicity);
            if (pick2 < 0.0) { center_pre = pre.point; break; }
        }

        std::vector<P1Point> next(frame.size());
        next.back() = center_pre;
        for (std::size_t i = 0; i + 1 < frame.size(); ++i) {
            const std::vector<Preimage> pres = preimages(chosen->map, frame[i]);
            double best = 2.0, second = 2.0;
            P1Point best_point = pres.front().point;
            for (const Preimage& pre : pres) {
                const double dist = chordal_distance(pre.point, center_pre);
                if (dist < best) {
                    second = best;
                    best = dist;
                    best_point = pre.point;
                } else if (dist < second) {
                    second = dist;
                }
            }
            if (second - best <= 1e-9) return out; // ambiguous continuation
            next[i] = best_point;
        }
        frame = std::move(next);
        out.diam.push_back(diameter(frame));
    }
    out.ok = true;
    return out;
}

double quantile_of(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

} // namespace

ShrinkProbeResult branch_shrink_probe(const Chain& c, const ShrinkProbeParams& params,
                                      unsigned workers) {
    if (!(params.radius > 0.0 && params.radius < 1.0))
        throw std::invalid_argument("shrink probe: radius must be in (0, 1)");
    if (params.depth < 0 || params.samples < 1)
        throw std::invalid_argument("shrink probe: bad depth or sample count");
    if (!c.key_condition())
        throw std::invalid_argument("shrink probe: requires d1 > d0");

    // Frame: K boundary points of the chordal disk W around the center, built
    // in a chart where the center sits at the origin, then rotated back.
    constexpr int kFramePoints = 16;
    const double rho = params.radius / std::sqrt(1.0 - params.radius * params.radius);
    const RationalMap back = rotation_from_zero(params.center);
    std::vector<P1Point> frame0;
    for (int k = 0; k < kFramePoints; ++k) {
        const double a = 2.0 * M_PI * k / kFramePoints;
        frame0.push_back(
            evaluate(back, affine_point(Complex{rho * std::cos(a), rho * std::sin(a)})));
    }
    frame0.push_back(params.center);

    std::vector<BranchLevels> tracks(static_cast<std::size_t>(params.samples));
    parallel_for(static_cast<std::size_t>(params.samples), workers, [&](std::size_t i) {
        tracks[i] = track_branch(c, params, frame0, i);
    });

    ShrinkProbeResult result;
    for (const BranchLevels& t : tracks)
        if (!t.ok) ++result.discarded;
    for (int level = 0; level <= params.depth; ++level) {
        std::vector<double> diams;
        for (const BranchLevels& t : tracks)
            if (t.ok && level < static_cast<int>(t.diam.size()))
                diams.push_back(t.diam[static_cast<std::size_t>(level)]);
        if (diams.empty())
            throw NumericalError("shrink probe: every branch was discarded");
        result.per_level.push_back(quantile_of(diams, 0.5));
        if (level == params.depth) {
            result.median_diam = quantile_of(diams, 0.5);
            result.quantile_diam = quantile_of(diams, 1.0 - params.epsilon);
        }
    }
    return result;
}

} // namespace corrdyn
