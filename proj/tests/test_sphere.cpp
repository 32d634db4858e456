#include <doctest.h>

#include <cmath>

#include "corrdyn/rng.hpp"
#include "corrdyn/sphere.hpp"

using namespace corrdyn;

TEST_CASE("chordal distance on reference pairs") {
    const P1Point zero = affine_point({0.0, 0.0});
    const P1Point one = affine_point({1.0, 0.0});
    const P1Point minus_one = affine_point({-1.0, 0.0});
    const P1Point inf = infinity_point();

    CHECK(chordal_distance(zero, inf) == doctest::Approx(1.0));
    CHECK(chordal_distance(one, minus_one) == doctest::Approx(1.0));
    CHECK(chordal_distance(zero, one) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(chordal_distance(one, one) == doctest::Approx(0.0));
}

TEST_CASE("projective normalization and affine projection") {
    const P1Point p = make_point({6.0, 0.0}, {3.0, 0.0});
    const AffineValue v = project_affine(p);
    CHECK_FALSE(v.is_infinity);
    CHECK(v.value.real() == doctest::Approx(2.0));
    CHECK(v.value.imag() == doctest::Approx(0.0));

    const P1Point q = make_point({1.0, 0.0}, {0.0, 0.0});
    CHECK(project_affine(q).is_infinity);
    CHECK(is_infinity(q));

    CHECK_THROWS_AS(make_point({0.0, 0.0}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("chordal distance is scale invariant in homogeneous coordinates") {
    SplitMix64 rng(99);
    for (int t = 0; t < 200; ++t) {
        const Complex a = rng.next_complex_gaussian();
        const Complex b = rng.next_complex_gaussian();
        const Complex c = rng.next_complex_gaussian();
        const Complex d = rng.next_complex_gaussian();
        const Complex lambda = rng.next_complex_gaussian() + Complex{3.0, 0.0};
        const P1Point p = make_point(a, b);
        const P1Point p_scaled = make_point(lambda * a, lambda * b);
        const P1Point q = make_point(c, d);
        CHECK(chordal_distance(p, q) ==
              doctest::Approx(chordal_distance(p_scaled, q)).epsilon(1e-12));
    }
}

TEST_CASE("triangle inequality on random triples") {
    for (std::uint64_t s = 0; s < 300; ++s) {
        const P1Point a = random_point(3 * s);
        const P1Point b = random_point(3 * s + 1);
        const P1Point c = random_point(3 * s + 2);
        CHECK(chordal_distance(a, c) <=
              chordal_distance(a, b) + chordal_distance(b, c) + 1e-12);
    }
}

TEST_CASE("diameter") {
    const P1Point zero = affine_point({0.0, 0.0});
    const P1Point inf = infinity_point();
    PointSet s{zero, inf};
    CHECK(diameter(s) == doctest::Approx(1.0));

    PointSet single{affine_point({0.3, 0.4})};
    CHECK(diameter(single) == 0.0);

    PointSet triple{affine_point({1.0, 0.0}), affine_point({-1.0, 0.0}),
                    affine_point({0.0, 1.0})};
    CHECK(diameter(triple) == doctest::Approx(1.0));

    PointSet pair{random_point(5), random_point(6)};
    CHECK(diameter(pair) == doctest::Approx(chordal_distance(pair[0], pair[1])));

    PointSet empty;
    CHECK_THROWS_AS(diameter(empty), std::invalid_argument);
}

TEST_CASE("random points: determinism and rough area uniformity") {
    const P1Point a = random_point(7);
    const P1Point b = random_point(7);
    CHECK(chordal_distance(a, b) == 0.0);
    CHECK(chordal_distance(random_point(7), random_point(8)) > 0.0);

    // |z| <= 1 should cover half the sphere area
    int inside = 0;
    const int trials = 10000;
    for (int s = 0; s < trials; ++s) {
        const AffineValue v = project_affine(random_point(static_cast<std::uint64_t>(s)));
        if (!v.is_infinity && std::abs(v.value) <= 1.0) ++inside;
    }
    const double fraction = static_cast<double>(inside) / trials;
    CHECK(fraction == doctest::Approx(0.5).epsilon(0.04));
}
