#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fwl/orbits.hpp"

using namespace fwl;

static std::string cfg(const char* name) {
    return std::string(FWL_CONFIG_DIR) + "/" + name;
}

TEST_CASE("reduced-word predicate") {
    CHECK(is_reduced({0, 1}));
    CHECK(is_reduced({0, 1, 2}));
    CHECK_FALSE(is_reduced({0, 0}));
    CHECK_FALSE(is_reduced({0, 1, 1, 2}));
    CHECK_FALSE(is_reduced({0, 1, 2, 0}));  // wraps onto itself
    CHECK_FALSE(is_reduced({0}));           // one letter wraps onto itself too
}

TEST_CASE("prime word census over three symbols") {
    // the reduced subshift has transfer matrix A = all-ones minus identity,
    // with tr A^n = 2^n + 2(-1)^n closed words; Moebius inversion gives the
    // prime class counts 0, 3, 2, 3, 6, 9 for periods 1..6
    const int expected[7] = {0, 0, 3, 2, 3, 6, 9};
    int total = 0;
    for (int P = 1; P <= 6; ++P) {
        auto words = prime_words(3, P);
        total = static_cast<int>(words.size());
        int count_P = 0;
        for (const auto& w : words) {
            CHECK(is_reduced(w));
            if (static_cast<int>(w.size()) == P) ++count_P;
        }
        CHECK(count_P == expected[P]);
    }
    CHECK(total == 23);
}

TEST_CASE("two-disc bouncing orbit: closed-form length and stability") {
    auto sys = load_system_file(cfg("two_discs.cfg"));  // gap length 1
    auto orb = find_periodic_orbit(sys, {0, 1});
    REQUIRE(orb.converged);
    REQUIRE(orb.realized);
    CHECK(orb.length == doctest::Approx(2.0).epsilon(1e-10));
    // per-bounce expansion 2 + sqrt(3) for unit gap and curvature, squared
    // over the two-bounce period
    double lam1 = 2.0 + std::sqrt(3.0);
    CHECK(orb.lambda == doctest::Approx(lam1 * lam1).epsilon(1e-8));
    double det = orb.monodromy[0][0] * orb.monodromy[1][1] -
                 orb.monodromy[0][1] * orb.monodromy[1][0];
    CHECK(det == doctest::Approx(1.0).epsilon(1e-8));
    REQUIRE(orb.points.size() == 2);
    for (const auto& q : orb.points) CHECK(std::abs(q.p) < 1e-10);
}

TEST_CASE("equilateral triangle orbit: symmetric bounce points") {
    auto sys = load_system_file(cfg("equilateral_d3.cfg"));
    auto orb = find_periodic_orbit(sys, {0, 1, 2});
    REQUIRE(orb.converged);
    REQUIRE(orb.realized);
    // each bounce point faces the centroid, so the orbit is the triangle
    // through the three inward points: side (sqrt(3)-1)*sqrt(3)
    CHECK(orb.length == doctest::Approx(9.0 - 3.0 * std::sqrt(3.0)).epsilon(1e-10));
    CHECK(orb.lambda > 1.0);
    for (const auto& q : orb.points) {
        Ray r = lift(sys, q);
        // bounce point between disc center and centroid (origin)
        CHECK(std::abs(cross(r.x, sys.disc(q.disc).center)) < 1e-9);
    }
}

TEST_CASE("full catalogue up to period 6 is hyperbolic") {
    auto sys = load_system_file(cfg("equilateral_d3.cfg"));
    auto orbits = all_orbits(sys, 6);
    CHECK(orbits.size() == 23);
    for (const auto& orb : orbits) {
        CHECK(orb.converged);
        CHECK(orb.realized);
        CHECK(orb.lambda > 1.0);
        CHECK(orb.length > 0.0);
        CHECK(orb.points.size() == orb.word.size());
    }
}
