#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "fwl/resonances.hpp"

using namespace fwl;

static std::string cfg(const char* name) {
    return std::string(FWL_CONFIG_DIR) + "/" + name;
}

TEST_CASE("single disc has no resonances") {
    auto sys = load_system_file(cfg("one_disc.cfg"));
    auto res = find_resonances(sys, 5.0, 10.0, -1.0, -0.1);
    CHECK(res.empty());
}

TEST_CASE("two-disc lattice at moderate wavenumber") {
    auto sys = load_system_file(cfg("two_discs.cfg"));
    auto res = find_resonances(sys, 20.0, 26.5, -1.2, -0.2);
    REQUIRE(res.size() == 2);
    CHECK(res[0].k.real() < res[1].k.real());
    // neighbouring zeros sit pi apart (unit surface gap)
    CHECK(res[1].k.real() - res[0].k.real() == doctest::Approx(M_PI).epsilon(0.01));
    double im_level = -0.5 * std::log(2.0 + std::sqrt(3.0));
    for (const auto& r : res) {
        CHECK(r.k.imag() == doctest::Approx(im_level).epsilon(0.05));
        CHECK(r.newton_residual < 1e-9);
        // the determinant really is small there
        auto ld = log_det_at(sys, r.k, {});
        CHECK(ld.real() < -10.0);  // |det| below e^-10 at the refined zero
    }
}

TEST_CASE("contour multiplicities around simple zeros") {
    auto sys = load_system_file(cfg("two_discs.cfg"));
    auto res = find_resonances(sys, 20.0, 23.5, -1.2, -0.2);
    REQUIRE(res.size() == 1);
    CHECK(multiplicity_contour(sys, res[0].k, 0.4) == 1);
    // a zero-free disc between two lattice points
    CHECK(multiplicity_contour(sys, res[0].k + cplx(M_PI / 2, 0.0), 0.4) == 0);
}

TEST_CASE("frozen high-wavenumber zeros reproduce") {
    auto sys = load_system_file(cfg("two_discs.cfg"));
    auto res = find_resonances(sys, 150.3, 154.3, -1.0, -0.3);
    REQUIRE(res.size() == 2);
    CHECK(std::abs(res[0].k - cplx(150.794373108, -0.6584661)) < 1e-5);
    CHECK(std::abs(res[1].k - cplx(153.9360116, -0.6584652)) < 1e-5);
}

TEST_CASE("spectral variable conversion") {
    double h = 0.02;
    cplx k(50.0, -0.5);
    cplx z = k_to_z(k, h);
    CHECK(z == cplx(0, 1) / h * (h * h * k * k - 1.0));
    // real wavenumber on the scaling shell k ~ 1/h maps near z = 0
    CHECK(std::abs(k_to_z(cplx(1.0 / h, 0.0), h)) < 1e-9);
}

TEST_CASE("counting fits on a synthetic lattice") {
    std::vector<Resonance> res;
    for (int n = 5; n <= 400; ++n)
        res.push_back({cplx(0.8 * n, -0.45), 1, 0.0});
    std::vector<double> rv;
    for (double r = 20; r <= 300; r *= 1.3) rv.push_back(r);
    auto fit = weyl_fit(res, 0.6, rv);
    REQUIRE(fit.fitted);
    // one-dimensional lattice inside the strip: N(r) ~ r / 0.8
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(0.02));
    // unit windows hold 1 or 2 lattice points each, so the log-log trend in r
    // is flat up to the integer jitter
    CHECK(std::abs(fit.window_slope) < 0.2);
    // a strip that excludes the lattice line counts nothing
    auto empty = weyl_fit(res, 0.2, rv);
    for (double n : empty.N) CHECK(n == 0.0);
}

TEST_CASE("CSV round trip") {
    std::vector<Resonance> res = {{cplx(12.25, -0.375), 1, 3e-13},
                                  {cplx(101.5, -1.625), 2, 8e-12}};
    std::string path = "/tmp/fwl_res_roundtrip.csv";
    write_resonances_csv(res, path);
    auto back = read_resonances_csv(path);
    std::remove(path.c_str());
    REQUIRE(back.size() == res.size());
    for (size_t i = 0; i < res.size(); ++i) {
        CHECK(std::abs(back[i].k - res[i].k) < 1e-12);
        CHECK(back[i].multiplicity == res[i].multiplicity);
    }
}
