#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "corrdyn/chain.hpp"

namespace corrdyn {

inline constexpr std::size_t kDefaultAtomCap = 2u << 20;

struct WeightedAtom {
    P1Point point;
    double weight = 0.0;
};

/// Finite weighted point cloud on the sphere. Atoms landing within the
/// point-identity tolerance (chordal 1e-9) of an existing atom are merged by
/// summing weights; insertion order is preserved, so construction is
/// deterministic.
class AtomicMeasure {
public:
    void add(const P1Point& p, double weight);
    void reserve(std::size_t n) { atoms_.reserve(n); }

    const std::vector<WeightedAtom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    double mass() const;

    static AtomicMeasure dirac(const P1Point& p);

private:
    std::vector<WeightedAtom> atoms_;
    // spatial hash over quantized sphere coordinates, for near-duplicate
    // lookup; hash collisions only cost extra distance checks
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

/// Full backward tree of depth n from the Dirac mass at w0, normalized by
/// d1^n; mass stays exactly 1. Throws CapExceeded when the level population
/// would pass `atom_cap`.
AtomicMeasure pullback_exact(const Chain& c, const P1Point& w0, int n,
                             std::size_t atom_cap = kDefaultAtomCap);

/// Monte-Carlo version: `count` independent backward orbits, each choosing a
/// component with probability m_j deg(g_j)/d1 and then a preimage
/// proportionally to multiplicity. Deterministic for a given seed and
/// independent of `workers`.
AtomicMeasure pullback_sample(const Chain& c, const P1Point& w0, int n, std::size_t count,
                              std::uint64_t seed, unsigned workers = 1);

struct RepellingPoint {
    P1Point point;
    Word word;
    double multiplier = 0.0;
    long long weight = 1; // word weight x fixed-point multiplicity
};

struct RepellingResult {
    AtomicMeasure measure; // mu_n: repelling fixed points weighted by 1/d1^n
    std::vector<RepellingPoint> points;
    long long bezout_total = 0; // sum over words of weight * (deg + 1)
    bool exact = true;          // false when the Newton-grid fall-back was used
};

/// mu_n of the n-th iterate: fixed points of every length-n word, repelling
/// ones (spherical multiplier > 1) contributing (word weight x multiplicity)
/// / d1^n. Words whose symbolic degree exceeds `degree_cap` are handled by a
/// Newton fall-back seeded from a sphere grid; that path reports a lower
/// bound only (exact = false) since it cannot count multiplicities.
RepellingResult repelling_measure(const Chain& c, int n,
                                  long long word_cap = kDefaultWordCap,
                                  int degree_cap = kDefaultDegreeCap);

/// Total-variation distance after pushing both measures onto a cube-sphere
/// binning with grid^2 cells per face. A fixed generic rotation is applied
/// before binning so that symmetry circles of common examples do not ride on
/// bin boundaries.
double binned_tv(const AtomicMeasure& a, const AtomicMeasure& b, int grid);

/// Bin index helper (6 * grid^2 bins), exposed for histograms and tests.
int cube_sphere_bin(const P1Point& p, int grid);

struct ShrinkProbeParams {
    P1Point center;
    double radius = 0.1; // chordal radius of the tracked disk W
    int depth = 4;
    int samples = 200;
    std::uint64_t seed = 0;
    double epsilon = 0.1; // reporting quantile
};

struct ShrinkProbeResult {
    double median_diam = 0.0;       // final level
    double quantile_diam = 0.0;     // (1 - epsilon) quantile at final level
    std::vector<double> per_level;  // median frame diameter, levels 0..depth
    int discarded = 0;              // branches dropped for ambiguous continuation
};

/// Tracks a frame of boundary points of the disk W through random inverse
/// branches, continuing each frame point to the preimage nearest the center's
/// preimage. Reports per-level diameter statistics.
ShrinkProbeResult branch_shrink_probe(const Chain& c, const ShrinkProbeParams& params,
                                      unsigned workers = 1);

} // namespace corrdyn
