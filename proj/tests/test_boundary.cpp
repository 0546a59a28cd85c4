#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "fwl/boundary.hpp"

using namespace fwl;

static std::string cfg(const char* name) {
    return std::string(FWL_CONFIG_DIR) + "/" + name;
}

static double mod_2pi(double x) {
    return std::remainder(x, 2.0 * M_PI);
}

TEST_CASE("log det on matrices with a known determinant") {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(3, 3);
    M(0, 0) = cplx(0.5, 0.0);
    M(1, 1) = cplx(-0.25, 0.1);
    M(2, 2) = cplx(0.0, 0.4);
    cplx det = (1.0 - M(0, 0)) * (1.0 - M(1, 1)) * (1.0 - M(2, 2));
    cplx ld = log_det_I_minus(M);
    CHECK(ld.real() == doctest::Approx(std::log(std::abs(det))).epsilon(1e-12));
    CHECK(mod_2pi(ld.imag() - std::arg(det)) == doctest::Approx(0.0).epsilon(1e-12));

    // nilpotent part must not contribute
    Eigen::MatrixXcd N = Eigen::MatrixXcd::Zero(2, 2);
    N(0, 1) = cplx(3.0, -2.0);
    CHECK(std::abs(log_det_I_minus(N)) < 1e-12);
}

TEST_CASE("operator block structure") {
    auto sys = load_system_file(cfg("two_discs.cfg"));
    auto op = build_M(sys, cplx(10.0, -0.4), 12);
    const int b = op.block_size();
    REQUIRE(op.M.rows() == 2 * b);
    REQUIRE(op.M.cols() == 2 * b);
    // diagonal blocks vanish: a disc does not scatter onto itself
    CHECK(op.M.block(0, 0, b, b).norm() == 0.0);
    CHECK(op.M.block(b, b, b, b).norm() == 0.0);
    CHECK(op.M.block(0, b, b, b).norm() > 0.0);
    CHECK(op.M.block(b, 0, b, b).norm() > 0.0);
}

TEST_CASE("single disc: empty interaction, unit determinant") {
    auto sys = load_system_file(cfg("one_disc.cfg"));
    auto op = build_M(sys, cplx(8.0, -0.5));
    CHECK(op.M.norm() == 0.0);
    CHECK(std::abs(log_det_I_minus(op.M)) == 0.0);
}

TEST_CASE("truncation rule and convergence") {
    auto sys = load_system_file(cfg("two_discs.cfg"));
    cplx k(10.0, -0.4);
    int m0 = truncation_order(sys, k);
    CHECK(m0 >= 10);  // at least k * max_radius angular momenta
    cplx ld0 = log_det_I_minus(build_M(sys, k, m0).M);
    cplx ld1 = log_det_I_minus(build_M(sys, k, m0 + 8).M);
    CHECK(std::abs(ld1.real() - ld0.real()) < 1e-8);
    CHECK(std::abs(mod_2pi(ld1.imag() - ld0.imag())) < 1e-8);
}

TEST_CASE("cyclic symmetry detection") {
    CHECK(has_cyclic_symmetry(load_system_file(cfg("equilateral_d3.cfg"))));
    CHECK(has_cyclic_symmetry(load_system_file(cfg("two_discs.cfg"))));
    CHECK_FALSE(has_cyclic_symmetry(load_system_file(cfg("collinear.cfg"))));
}

TEST_CASE("sector decomposition reproduces the full determinant") {
    auto sys = load_system_file(cfg("equilateral_d3.cfg"));
    for (cplx k : {cplx(6.0, -0.3), cplx(21.5, -0.55)}) {
        int m = truncation_order(sys, k);
        auto blocks = cyclic_sector_blocks(sys, k, m);
        REQUIRE(blocks.size() == 3);
        int total_dim = 0;
        cplx sum = 0.0;
        for (const auto& B : blocks) {
            total_dim += static_cast<int>(B.rows());
            sum += log_det_I_minus(B);
        }
        CHECK(total_dim == 3 * (2 * m + 1));
        cplx full = log_det_I_minus(build_M(sys, k, m).M);
        CHECK(sum.real() == doctest::Approx(full.real()).epsilon(1e-9));
        CHECK(std::abs(mod_2pi(sum.imag() - full.imag())) < 1e-8);
        cplx conv = log_det_I_minus_cyclic(sys, k, m);
        CHECK(conv.real() == doctest::Approx(sum.real()).epsilon(1e-12));
    }
}
