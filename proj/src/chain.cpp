#include "corrdyn/chain.hpp"

#include <cmath>
#include <stdexcept>

#include "corrdyn/errors.hpp"

namespace corrdyn {

int Chain::d1() const {
    int s = 0;
    for (const ChainComponent& c : components) s += c.mult * c.map.degree;
    return s;
}

int Chain::d0() const {
    int s = 0;
    for (const ChainComponent& c : components) s += c.mult;
    return s;
}

int Chain::max_degree() const {
    int m = 0;
    for (const ChainComponent& c : components) m = std::max(m, c.map.degree);
    return m;
}

Chain make_chain(std::vector<ChainComponent> components) {
    if (components.empty())
        throw std::invalid_argument("chain: needs at least one component");
    for (const ChainComponent& c : components)
        if (c.mult < 1) throw std::invalid_argument("chain: multiplicity must be >= 1");
    return Chain{std::move(components)};
}

ChainDegrees chain_degrees(const Chain& c) {
    return ChainDegrees{c.d1(), c.d0(), c.key_condition()};
}

Chain compose_chains(const Chain& a, const Chain& b, int degree_cap) {
    std::vector<ChainComponent> out;
    for (const ChainComponent& ca : a.components) {
        for (const ChainComponent& cb : b.components) {
            RationalMap m = compose_maps(cb.map, ca.map, degree_cap);
            const int mult = ca.mult * cb.mult;
            bool merged = false;
            for (ChainComponent& existing : out) {
                if (maps_equal(existing.map, m)) {
                    existing.mult += mult;
                    merged = true;
                    break;
                }
            }
            if (!merged) out.push_back(ChainComponent{std::move(m), mult});
        }
    }
    return make_chain(std::move(out));
}

std::vector<Word> enumerate_words(const Chain& c, int n, long long word_cap) {
    if (n < 1) throw std::invalid_argument("enumerate_words: n must be >= 1");
    const int k = static_cast<int>(c.components.size());
    double estimate = std::pow(static_cast<double>(k), n);
    if (estimate > static_cast<double>(word_cap))
        throw CapExceeded("enumerate_words: " + std::to_string(estimate) +
                          " words exceed cap " + std::to_string(word_cap));
    std::vector<Word> words;
    words.reserve(static_cast<std::size_t>(estimate));
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
        long long weight = 1;
        for (int i : idx) weight *= c.components[static_cast<std::size_t>(i)].mult;
        words.push_back(Word{idx, weight});
        int pos = n - 1;
        while (pos >= 0) {
            if (++idx[static_cast<std::size_t>(pos)] < k) break;
            idx[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return words;
}

RationalMap word_map(const Chain& c, const Word& w, int degree_cap) {
    if (w.indices.empty()) throw std::invalid_argument("word_map: empty word");
    RationalMap m = c.components[static_cast<std::size_t>(w.indices[0])].map;
    for (std::size_t i = 1; i < w.indices.size(); ++i)
        m = compose_maps(c.components[static_cast<std::size_t>(w.indices[i])].map, m,
                         degree_cap);
    return m;
}

std::vector<P1Point> word_orbit(const Chain& c, const Word& w, const P1Point& p) {
    std::vector<P1Point> orbit;
    orbit.reserve(w.indices.size() + 1);
    orbit.push_back(p);
    for (int j : w.indices)
        orbit.push_back(evaluate(c.components[static_cast<std::size_t>(j)].map, orbit.back()));
    return orbit;
}

double word_multiplier(const Chain& c, const Word& w, const P1Point& p) {
    double product = 1.0;
    P1Point x = p;
    for (int j : w.indices) {
        const RationalMap& g = c.components[static_cast<std::size_t>(j)].map;
        product *= spherical_multiplier(g, x);
        x = evaluate(g, x);
    }
    return product;
}

namespace {

void insert_dedup(PointSet& set, const P1Point& p, std::size_t cap) {
    for (const P1Point& q : set)
        if (points_equal(p, q, kCommonRootTol)) return;
    if (set.size() >= cap)
        throw CapExceeded("critical_union: point cap exceeded");
    set.push_back(p);
}

} // namespace

PointSet critical_union(const Chain& c, int l, std::size_t point_cap) {
    if (l < 1) throw std::invalid_argument("critical_union: l must be >= 1");
    // S1 = union of generator critical values.
    PointSet s1;
    for (const ChainComponent& comp : c.components)
        for (const P1Point& v : critical_values(comp.map)) insert_dedup(s1, v, point_cap);

    // T_m = critical values of length-m words = S1 + generator images of T_{m-1}.
    PointSet total = s1;
    PointSet level = s1;
    for (int m = 2; m <= l; ++m) {
        PointSet next = s1;
        for (const ChainComponent& comp : c.components)
            for (const P1Point& p : level)
                insert_dedup(next, evaluate(comp.map, p), point_cap);
        for (const P1Point& p : next) insert_dedup(total, p, point_cap);
        level = std::move(next);
    }
    return total;
}

BranchBoundReport branch_count_bound(const Chain& c, int n, int l) {
    if (n < 1 || l < 1)
        throw std::invalid_argument("branch_count_bound: n and l must be >= 1");
    const int tau = static_cast<int>(critical_union(c, 1).size());
    const double d1 = static_cast<double>(c.d1());
    const double nl = static_cast<double>(c.n_list());
    double fraction =
        1.0 - std::pow(nl / d1, static_cast<double>(l)) * static_cast<double>(tau) * (nl + 1.0);
    if (fraction < 0.0) fraction = 0.0;
    return BranchBoundReport{n, l, tau, fraction,
                             fraction * std::pow(d1, static_cast<double>(n))};
}

} // namespace corrdyn
