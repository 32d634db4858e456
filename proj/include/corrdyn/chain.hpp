#pragma once

#include <cstdint>
#include <vector>

#include "corrdyn/rational_map.hpp"

namespace corrdyn {

inline constexpr long long kDefaultWordCap = 1 << 20;

/// Weighted sum of graphs of rational maps: the correspondence
/// Gamma = sum m_j * graph(g_j). d1 is the topological degree (generic
/// preimage count with multiplicity), d0 the degree of the adjoint.
struct ChainComponent {
    RationalMap map;
    int mult = 1;
};

struct Chain {
    std::vector<ChainComponent> components;

    int d1() const;            // sum m_j * deg(g_j)
    int d0() const;            // sum m_j (list length)
    int n_list() const { return d0(); }
    int max_degree() const;
    bool key_condition() const { return d1() > d0(); }
};

Chain make_chain(std::vector<ChainComponent> components);

struct ChainDegrees {
    int d1 = 0;
    int d0 = 0;
    bool key_condition = false;
};

ChainDegrees chain_degrees(const Chain& c);

/// Indices of generators applied left to right: indices[0] acts first, so the
/// word is g[indices.back()] o ... o g[indices[0]]. Weight is the product of
/// the component multiplicities.
struct Word {
    std::vector<int> indices;
    long long weight = 1;
};

/// All pairwise compositions b_l o a_j with multiplied weights; components
/// that agree numerically after canonical normalization (tolerance 1e-9) are
/// merged by summing multiplicities.
Chain compose_chains(const Chain& a, const Chain& b, int degree_cap = kDefaultDegreeCap);

/// All component^n index sequences in lexicographic order. Throws CapExceeded
/// when (number of components)^n exceeds `word_cap`.
std::vector<Word> enumerate_words(const Chain& c, int n, long long word_cap = kDefaultWordCap);

/// Symbolic composition of the word's maps (subject to the degree cap).
RationalMap word_map(const Chain& c, const Word& w, int degree_cap = kDefaultDegreeCap);

/// Product of spherical multipliers along the orbit of p; equals the
/// multiplier of the symbolically composed map by the chain rule.
double word_multiplier(const Chain& c, const Word& w, const P1Point& p);

/// Forward orbit of p under the word (p, g_{j1}(p), ...), length |w|+1.
std::vector<P1Point> word_orbit(const Chain& c, const Word& w, const P1Point& p);

/// C_l: union of critical values of all words of length <= l, computed via
/// suffix forward images (never composing symbolically): the critical values
/// of f o v are f(critical values of v) together with those of f.
PointSet critical_union(const Chain& c, int l, std::size_t point_cap = 1u << 20);

struct BranchBoundReport {
    int n = 0;
    int l = 0;
    int tau = 0;       // Card(C_1)
    double fraction = 0.0; // max(0, 1 - (N/d1)^l * tau * (N+1))
    double bound = 0.0;    // fraction * d1^n, a lower bound for the regular branch count
};

/// Guaranteed count of regular inverse branches of the n-th iterate over a
/// simply connected set avoiding C_l.
BranchBoundReport branch_count_bound(const Chain& c, int n, int l);

} // namespace corrdyn
