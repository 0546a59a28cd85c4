#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fwl/dimension.hpp"

using namespace fwl;

namespace {

std::vector<double> log_scales(double hi, double lo, int n) {
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i)
        s[i] = hi * std::pow(lo / hi, static_cast<double>(i) / (n - 1));
    return s;
}

// Orbit catalogue of the reduced three-symbol shift with a uniform per-bounce
// expansion rate: every invariant of the cycle expansion has a closed form.
std::vector<PeriodicOrbit> uniform_catalogue(double lambda_per_bounce,
                                             double length_per_bounce,
                                             int max_period) {
    std::vector<PeriodicOrbit> orbits;
    for (const auto& w : prime_words(3, max_period)) {
        PeriodicOrbit o;
        o.word = w;
        int n = static_cast<int>(w.size());
        o.length = length_per_bounce * n;
        o.lambda = std::pow(lambda_per_bounce, n);
        o.converged = o.realized = true;
        orbits.push_back(std::move(o));
    }
    return orbits;
}

}  // namespace

TEST_CASE("box counting rejects inadequate scale ladders") {
    TrappedSample s;
    s.points = {{0, 1.0, 0.0}, {0, 2.0, 0.5}, {0, 3.0, -0.5}, {0, 4.0, 0.1}};
    CHECK_THROWS_AS(box_dimension(s, {0.1, 0.05, 0.02}), std::invalid_argument);
    CHECK_THROWS_AS(box_dimension(s, {0.1, 0.08, 0.05, 0.02}), std::invalid_argument);
    CHECK_NOTHROW(box_dimension(s, {0.2, 0.05, 0.02, 0.005}));
}

TEST_CASE("box counting recovers the dimension of synthetic sets") {
    auto scales = log_scales(0.2, 0.005, 6);

    SUBCASE("a smooth curve has dimension 1") {
        TrappedSample s;
        for (int i = 0; i < 4000; ++i)
            s.points.push_back({0, 2 * M_PI * i / 4000.0, 0.0});
        auto est = box_dimension(s, scales);
        CHECK(est.dim == doctest::Approx(1.0).epsilon(0.03));
        CHECK(est.r2 > 0.999);
        CHECK(est.pure_dim);
    }
    SUBCASE("a filled rectangle has dimension 2") {
        TrappedSample s;
        for (int i = 0; i < 700; ++i)
            for (int j = 0; j < 700; ++j)
                s.points.push_back({0, 6.0 * i / 700.0, -1.0 + 2.0 * j / 700.0});
        auto est = box_dimension(s, scales);
        CHECK(est.dim == doctest::Approx(2.0).epsilon(0.03));
    }
    SUBCASE("a middle-third Cantor slice has dimension log2/log3") {
        TrappedSample s;
        const int depth = 9;
        for (int idx = 0; idx < (1 << depth); ++idx) {
            double x = 0.0, w = 1.0;
            for (int b = 0; b < depth; ++b) {
                w /= 3.0;
                if (idx & (1 << b)) x += 2.0 * w;
            }
            s.points.push_back({0, 6.0 * x, 0.0});
        }
        auto est = box_dimension(s, scales);
        CHECK(est.dim == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(0.05));
    }
}

TEST_CASE("pressure root of the uniform catalogue matches the closed form") {
    // prod_p (1 - u^{n_p}) truncated at period 6 equals the characteristic
    // polynomial (1 - 2u)(1 + u)^2 of the reduced shift, so the zero sits at
    // u = Lambda^{-s} = 1/2 exactly
    for (double lam : {9.0, 16.0, 30.0}) {
        auto orbits = uniform_catalogue(lam, 0.7, 6);
        auto est = pressure_dimension(orbits, 6);
        double s_star = std::log(2.0) / std::log(lam);
        CHECK(est.mu == doctest::Approx(s_star).epsilon(1e-9));
        CHECK(est.dim == doctest::Approx(2.0 * s_star).epsilon(1e-9));
        CHECK(est.counts[0] < 1e-10);  // residual of the expanded product
    }
}

TEST_CASE("escape rate of the uniform catalogue matches the closed form") {
    const double lam = 9.0, L0 = 0.7;
    auto orbits = uniform_catalogue(lam, L0, 6);
    auto rate = escape_rate(orbits, 6);
    CHECK(rate.gamma0_per_bounce == doctest::Approx(std::log(lam / 2.0)).epsilon(1e-8));
    CHECK(rate.gamma0_per_length ==
          doctest::Approx(std::log(lam / 2.0) / L0).epsilon(1e-8));
}

TEST_CASE("pressure and box estimates agree on the degenerate two-disc set") {
    auto sys = load_system_file(std::string(FWL_CONFIG_DIR) + "/two_discs.cfg");
    auto orbits = all_orbits(sys, 6);
    REQUIRE(orbits.size() == 1);  // only the bouncing word 01
    auto est = pressure_dimension(orbits, 6);
    CHECK(std::abs(est.dim) < 0.05);

    auto ts = trapped_sample(sys, 8, 600, 300);
    CHECK_FALSE(ts.points.empty());
    auto box = box_dimension(ts, log_scales(0.2, 0.005, 6));
    CHECK(std::abs(box.dim) < 0.05);
}

TEST_CASE("report serialization carries the diagnostics") {
    auto orbits = uniform_catalogue(9.0, 0.7, 6);
    auto est = pressure_dimension(orbits, 6);
    auto rate = escape_rate(orbits, 6);
    auto text = dimension_report_json(est, &rate);
    CHECK(text.find("\"method\": \"pressure\"") != std::string::npos);
    CHECK(text.find("\"gamma0\"") != std::string::npos);
    CHECK(text.find("\"dim\"") != std::string::npos);
}
