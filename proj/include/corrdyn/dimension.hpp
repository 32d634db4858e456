#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corrdyn/measure.hpp"

namespace corrdyn {

enum class SampleSource { repelling, pullback, circle_analytic };

/// Finite stand-in for the Julia set: repelling-point locations and/or deep
/// pullback atoms.
struct JuliaSample {
    PointSet points;
    SampleSource source = SampleSource::repelling;
};

struct RecoordinateResult {
    Chain chain;
    JuliaSample sample;
    bool recoordinated = false;
};

/// Moves infinity away from the sample and its generator images when they
/// come within chordal 0.05 of it, by conjugating every generator with a
/// rotation that sends a maximally clear point to infinity. Throws
/// NumericalError (case (a) suspicion) when no candidate has clearance 0.01.
RecoordinateResult recoordinate(const Chain& c, const JuliaSample& s);

/// sup |g_j'(xi)| over the sample in the affine chart. Sets *critical_warning
/// when some generator is numerically critical on a sample point (the
/// dimension bound assumes critical-point-free generators on the Julia set).
double estimate_M(const Chain& c, const JuliaSample& s, bool* critical_warning = nullptr);

struct LambdaRow {
    long long k = 1;
    double R_k = 0.0;      // d1(Gamma(k)) / d0(Gamma(k))
    double lambda_k = 0.0; // log R_k / log M
};

struct DimensionReport {
    double M = 0.0;
    int max_deg = 0;
    double bound = 0.0; // log(max_deg)/log(M), the k -> infinity limit
    std::vector<LambdaRow> lambda_table;
    double box_dim = 0.0;
    double fit_quality = 0.0;
    bool case_a = false;
    bool recoordinated = false;
    bool critical_warning = false;
};

/// lambda(k) for the reweighted chain Gamma(k) that multiplies the maximal
/// degree component's weight by k.
double lambda_k(const Chain& c, double M, long long k);

/// The closed-form dimension ladder: lambda(k) for k = 1..k_max (table capped
/// at 64 rows, always including k_max) and the limiting bound
/// log(max_deg)/log(M). Throws NumericalError when M <= 1.
DimensionReport lower_bound(const Chain& c, const JuliaSample& s, long long k_max);

struct BoxDimension {
    double dim = 0.0;
    double fit_quality = 0.0;
    std::vector<std::pair<double, std::size_t>> counts; // (scale, boxes)
};

/// Least-squares slope of log N(eps) against log(1/eps) over square boxes in
/// the affine chart. Needs >= 4 scales in (0, 0.5) and a sample with no point
/// at infinity.
BoxDimension box_dimension(const JuliaSample& s, const std::vector<double>& scales);

std::vector<double> default_box_scales(); // 2^-3 .. 2^-8

/// Chain of power maps z^d for strictly increasing degrees >= 2; rejects a
/// degree that is a product of earlier ones (the family must be freely
/// generated).
Chain power_family(const std::vector<int>& degrees);

/// True when the sample together with its generator images is 0.05-dense on
/// the sphere; the Hausdorff dimension is 2 in that case.
bool case_a_check(const Chain& c, const JuliaSample& s);

/// n points on the unit circle, exact moduli (useful for analytic samples).
JuliaSample circle_sample(std::size_t n);

} // namespace corrdyn
