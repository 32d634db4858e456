#include "corrdyn/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "corrdyn/errors.hpp"
#include "corrdyn/rng.hpp"

namespace corrdyn {

namespace {

// Fibonacci sphere lattice used for the density net and candidate searches.
PointSet fibonacci_net(std::size_t count) {
    PointSet net;
    net.reserve(count);
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (std::size_t s = 0; s < count; ++s) {
        const double zc = 1.0 - 2.0 * (static_cast<double>(s) + 0.5) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
        const double th = golden * static_cast<double>(s);
        // stereographic from the north pole: equator -> unit circle
        if (1.0 - zc < 1e-15) {
            net.push_back(infinity_point());
        } else {
            net.push_back(affine_point(
                Complex{r * std::cos(th) / (1.0 - zc), r * std::sin(th) / (1.0 - zc)}));
        }
    }
    return net;
}

PointSet sample_with_images(const Chain& c, const JuliaSample& s) {
    PointSet all = s.points;
    for (const ChainComponent& comp : c.components)
        for (const P1Point& p : s.points) all.push_back(evaluate(comp.map, p));
    return all;
}

double min_distance(const P1Point& p, const PointSet& set) {
    double best = 1.0;
    for (const P1Point& q : set) best = std::min(best, chordal_distance(p, q));
    return best;
}

} // namespace

RecoordinateResult recoordinate(const Chain& c, const JuliaSample& s) {
    if (s.points.empty()) throw std::invalid_argument("recoordinate: empty sample");
    const PointSet all = sample_with_images(c, s);
    const P1Point inf = infinity_point();
    if (min_distance(inf, all) > 0.05) return RecoordinateResult{c, s, false};

    // Infinity is too close; look for the clearest point among random
    // candidates (fixed internal seed: the search itself is deterministic).
    constexpr std::uint64_t kSearchSeed = 0x5EAC4D1835A7C901ull;
    P1Point best_candidate = inf;
    double best_clearance = -1.0;
    for (int t = 0; t < 10000; ++t) {
        const P1Point cand = random_point(mix64(kSearchSeed + static_cast<std::uint64_t>(t)));
        const double clearance = min_distance(cand, all);
        if (clearance > best_clearance) {
            best_clearance = clearance;
            best_candidate = cand;
        }
    }
    if (best_clearance < 0.01)
        throw NumericalError(
            "recoordinate: no clear point on the sphere (case (a) suspicion: sample "
            "plus images may cover everything)");

    const RationalMap to_inf = rotation_to_infinity(best_candidate);
    const RationalMap from_inf = rotation_from_infinity(best_candidate);
    std::vector<ChainComponent> conj;
    conj.reserve(c.components.size());
    for (const ChainComponent& comp : c.components)
        conj.push_back(ChainComponent{
            compose_maps(to_inf, compose_maps(comp.map, from_inf)), comp.mult});
    JuliaSample moved;
    moved.source = s.source;
    moved.points.reserve(s.points.size());
    for (const P1Point& p : s.points) moved.points.push_back(evaluate(to_inf, p));
    return RecoordinateResult{make_chain(std::move(conj)), std::move(moved), true};
}

double estimate_M(const Chain& c, const JuliaSample& s, bool* critical_warning) {
    if (s.points.empty()) throw std::invalid_argument("estimate_M: empty sample");
    if (critical_warning) *critical_warning = false;
    double m = 0.0;
    for (const ChainComponent& comp : c.components) {
        for (const P1Point& p : s.points) {
            if (is_infinity(p))
                throw NumericalError("estimate_M: sample point at infinity; recoordinate first");
            const double d = affine_derivative(comp.map, p);
            if (d < 1e-9 && critical_warning) *critical_warning = true;
            m = std::max(m, d);
        }
    }
    return m;
}

double lambda_k(const Chain& c, double M, long long k) {
    if (M <= 1.0) throw NumericalError("lambda_k: M <= 1 (degenerate sample)");
    // Gamma(k) multiplies the weight of the maximal-degree component by k.
    int top = 0;
    for (std::size_t i = 1; i < c.components.size(); ++i)
        if (c.components[i].map.degree >= c.components[top].map.degree)
            top = static_cast<int>(i);
    const ChainComponent& heavy = c.components[static_cast<std::size_t>(top)];
    const double d1k = static_cast<double>(c.d1()) +
                       static_cast<double>(k - 1) *
                           static_cast<double>(heavy.mult * heavy.map.degree);
    const double d0k =
        static_cast<double>(c.d0()) + static_cast<double>(k - 1) * heavy.mult;
    return std::log(d1k / d0k) / std::log(M);
}

DimensionReport lower_bound(const Chain& c, const JuliaSample& s, long long k_max) {
    if (k_max < 1) throw std::invalid_argument("lower_bound: k_max must be >= 1");
    DimensionReport report;
    report.max_deg = c.max_degree();
    report.M = estimate_M(c, s, &report.critical_warning);
    if (report.M <= 1.0)
        throw NumericalError("lower_bound: M <= 1, the dimension bound is undefined");
    if (!c.key_condition() && c.max_degree() < 2)
        throw NumericalError("lower_bound: no generator of degree >= 2");

    report.bound = std::log(static_cast<double>(report.max_deg)) / std::log(report.M);

    constexpr long long kTableCap = 64;
    double previous = -1.0;
    for (long long k = 1; k <= k_max; ++k) {
        if (k > kTableCap && k != k_max) continue;
        LambdaRow row;
        row.k = k;
        row.lambda_k = lambda_k(c, report.M, k);
        int top = 0;
        for (std::size_t i = 1; i < c.components.size(); ++i)
            if (c.components[i].map.degree >= c.components[top].map.degree)
                top = static_cast<int>(i);
        const ChainComponent& heavy = c.components[static_cast<std::size_t>(top)];
        row.R_k = (static_cast<double>(c.d1()) +
                   static_cast<double>(k - 1) *
                       static_cast<double>(heavy.mult * heavy.map.degree)) /
                  (static_cast<double>(c.d0()) + static_cast<double>(k - 1) * heavy.mult);
        if (row.lambda_k < previous - 1e-12)
            throw NumericalError("lower_bound: lambda(k) not monotone");
        previous = row.lambda_k;
        report.lambda_table.push_back(row);
    }
    return report;
}

std::vector<double> default_box_scales() {
    return {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
}

BoxDimension box_dimension(const JuliaSample& s, const std::vector<double>& scales) {
    if (scales.size() < 4)
        throw std::invalid_argument("box_dimension: need at least 4 scales");
    for (double e : scales)
        if (!(e > 0.0 && e < 0.5))
            throw std::invalid_argument("box_dimension: scales must lie in (0, 0.5)");
    if (s.points.empty()) throw std::invalid_argument("box_dimension: empty sample");

    std::vector<Complex> pts;
    pts.reserve(s.points.size());
    for (const P1Point& p : s.points) {
        if (is_infinity(p))
            throw NumericalError("box_dimension: point at infinity; recoordinate first");
        pts.push_back(project_affine(p).value);
    }

    BoxDimension out;
    std::vector<double> xs, ys;
    for (double e : scales) {
        std::set<std::pair<long long, long long>> boxes;
        for (const Complex& z : pts)
            boxes.insert({static_cast<long long>(std::floor(z.real() / e)),
                          static_cast<long long>(std::floor(z.imag() / e))});
        out.counts.push_back({e, boxes.size()});
        xs.push_back(std::log(1.0 / e));
        ys.push_back(std::log(static_cast<double>(boxes.size())));
    }

    // least squares fit and R^2
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double fit = slope * xs[i] + intercept;
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    out.dim = slope;
    out.fit_quality = ss_tot < 1e-30 ? 1.0 : 1.0 - ss_res / ss_tot;
    return out;
}

Chain power_family(const std::vector<int>& degrees) {
    if (degrees.empty()) throw std::invalid_argument("power_family: no degrees");
    std::vector<ChainComponent> comps;
    std::set<long long> reachable{1};
    int previous = 1;
    for (int d : degrees) {
        if (d < 2) throw std::invalid_argument("power_family: degrees must be >= 2");
        if (d <= previous)
            throw std::invalid_argument("power_family: degrees must be strictly increasing");
        if (reachable.count(d))
            throw std::invalid_argument(
                "power_family: degree " + std::to_string(d) +
                " is a product of earlier degrees (family is not freely generated)");
        comps.push_back(ChainComponent{power_map(d), 1});
        // close the reachable set multiplicatively up to a working bound
        const long long limit = 1 << 20;
        std::vector<long long> frontier{d};
        reachable.insert(d);
        while (!frontier.empty()) {
            std::vector<long long> next;
            for (long long v : frontier) {
                for (long long w : std::set<long long>(reachable)) {
                    const long long prod = v * w;
                    if (prod <= limit && !reachable.count(prod)) {
                        reachable.insert(prod);
                        next.push_back(prod);
                    }
                }
            }
            frontier = std::move(next);
        }
        previous = d;
    }
    return make_chain(std::move(comps));
}

bool case_a_check(const Chain& c, const JuliaSample& s) {
    if (s.points.empty()) throw std::invalid_argument("case_a_check: empty sample");
    const PointSet all = sample_with_images(c, s);
    // every cell of a 0.05-chordal net must be hit
    const PointSet net = fibonacci_net(4000);
    for (const P1Point& cell : net)
        if (min_distance(cell, all) > 0.05) return false;
    return true;
}

JuliaSample circle_sample(std::size_t n) {
    JuliaSample s;
    s.source = SampleSource::circle_analytic;
    s.points.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
        s.points.push_back(affine_point(Complex{std::cos(a), std::sin(a)}));
    }
    return s;
}

} // namespace corrdyn
