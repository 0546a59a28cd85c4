#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "fwl/open_map.hpp"

using namespace fwl;

TEST_CASE("construction rejects bad sizes") {
    CHECK_THROWS(open_baker(80));
    CHECK_NOTHROW(open_baker(27));
}

TEST_CASE("small-size structure: the middle third is annihilated") {
    auto b = open_baker(3);
    REQUIRE(b.N == 3);
    REQUIRE(b.M.rows() == 3);
    CHECK(b.M.col(1).norm() == 0.0);  // hole column
    for (int j : {0, 2})
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(b.M(i, j)) == doctest::Approx(1.0 / std::sqrt(3.0)));

    auto b27 = open_baker(27);
    for (int j = 9; j < 18; ++j) CHECK(b27.M.col(j).norm() == 0.0);
    CHECK_FALSE(b27.trapped_samples.empty());
    for (const auto& t : b27.trapped_samples) {
        CHECK(t.q >= 0.0);
        CHECK(t.q < 1.0);
        // Cantor-repeller samples avoid the open middle third in q and p
        CHECK_FALSE((t.q > 1.0 / 3 + 1e-9 && t.q < 2.0 / 3 - 1e-9));
        CHECK_FALSE((t.p > 1.0 / 3 + 1e-9 && t.p < 2.0 / 3 - 1e-9));
    }
}

TEST_CASE("subunitarity: all singular values within 1") {
    for (int N : {27, 81, 243}) {
        auto b = open_baker(N);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b.M);
        CHECK(svd.singularValues().maxCoeff() <= 1.0 + 1e-10);
        auto ev = eigenvalues(b.M);
        for (int i = 0; i < ev.size(); ++i) CHECK(std::abs(ev(i)) <= 1.0 + 1e-10);
    }
}

TEST_CASE("frozen eigenvalue counts for the smallest sizes") {
    auto count = [](const Eigen::VectorXcd& ev, double r) {
        int n = 0;
        for (int i = 0; i < ev.size(); ++i)
            if (std::abs(ev(i)) >= r) ++n;
        return n;
    };
    auto e81 = eigenvalues(open_baker(81).M);
    CHECK(count(e81, 0.3) == 30);
    CHECK(count(e81, 0.5) == 28);
    CHECK(count(e81, 0.7) == 18);
    auto e243 = eigenvalues(open_baker(243).M);
    CHECK(count(e243, 0.3) == 70);
    CHECK(count(e243, 0.5) == 62);
    CHECK(count(e243, 0.7) == 47);
}

TEST_CASE("dense eigenvalue solver against a known spectrum") {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(3, 3);
    A(0, 0) = cplx(0.5, 0.25);
    A(1, 1) = cplx(-0.125, 0.0);
    A(2, 2) = cplx(0.0, -0.75);
    A(0, 2) = cplx(2.0, 1.0);  // upper-triangular part leaves the spectrum alone
    auto ev = eigenvalues(A);
    std::vector<cplx> want = {A(0, 0), A(1, 1), A(2, 2)};
    for (cplx w : want) {
        double best = 1e9;
        for (int i = 0; i < ev.size(); ++i) best = std::min(best, std::abs(ev(i) - w));
        CHECK(best < 1e-12);
    }
}

TEST_CASE("coherent states: normalization and overlap decay") {
    const int N = 81;
    auto psi = coherent_state(N, 0.25, 0.5);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
    auto phi = coherent_state(N, 0.75, 0.5);
    // states half a torus apart are numerically orthogonal
    CHECK(std::abs(psi.dot(phi)) < 1e-8);
    // nearby states overlap strongly
    auto chi = coherent_state(N, 0.25 + 0.2 / std::sqrt(double(N)), 0.5);
    CHECK(std::abs(psi.dot(chi)) > 0.9);
}

TEST_CASE("projector pair: idempotent, Hermitian, consistent rank") {
    auto b = open_baker(81);
    auto proj = coherent_projectors(b, 1.0);
    for (const Eigen::MatrixXcd* P : {&proj.Pi_V, &proj.Pi_h}) {
        CHECK((*P - P->adjoint()).norm() < 1e-10);
        CHECK((*P * *P - *P).norm() < 1e-10);
    }
    CHECK(proj.rank_V > 0);
    CHECK(proj.rank_h >= proj.rank_V);
    CHECK((proj.R_V.adjoint() * proj.R_V -
           Eigen::MatrixXcd::Identity(proj.rank_V, proj.rank_V))
              .norm() < 1e-10);
    CHECK((proj.R_V * proj.R_V.adjoint() - proj.Pi_V).norm() < 1e-9);
    CHECK(std::abs(proj.Pi_V.trace().real() - proj.rank_V) < 1e-8);
    // the wider projector essentially dominates the trapped one
    CHECK((proj.Pi_h * proj.Pi_V - proj.Pi_V).norm() < 0.5);
}

TEST_CASE("anti-Wick quantization: unit symbol, positivity, bounds") {
    const int N = 81;
    auto A1 = anti_wick(N, [](double, double) { return 1.0; });
    CHECK((A1 - Eigen::MatrixXcd::Identity(N, N)).norm() < 0.01 * std::sqrt(double(N)));
    auto g = [](double q, double p) {
        return 0.5 + 0.5 * std::sin(2 * M_PI * q) * std::cos(2 * M_PI * p);
    };
    auto A = anti_wick(N, g);
    CHECK((A - A.adjoint()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
    CHECK(es.eigenvalues().minCoeff() > -1e-9);       // symbol >= 0
    CHECK(es.eigenvalues().maxCoeff() < 1.0 + 0.01);  // symbol <= 1
}

TEST_CASE("weight conjugation preserves the spectrum") {
    auto b = open_baker(27);
    auto G = anti_wick(27, [](double q, double p) {
        return std::cos(2 * M_PI * q) + 0.5 * std::sin(2 * M_PI * p);
    });
    CHECK((weight_conjugate(b.M, G, 0.0) - b.M).norm() < 1e-12);
    auto Mt = weight_conjugate(b.M, G, 0.7);
    // compare the first trace invariants of the conjugated and original maps
    Eigen::MatrixXcd P1 = b.M, Q1 = Mt;
    for (int k = 1; k <= 3; ++k) {
        CHECK(std::abs(P1.trace() - Q1.trace()) < 1e-8 * (1.0 + std::abs(P1.trace())));
        P1 *= b.M;
        Q1 *= Mt;
    }
}

TEST_CASE("effective-Hamiltonian reduction") {
    auto b = open_baker(81);
    auto proj = coherent_projectors(b, 1.0);

    SUBCASE("full-space reduction degenerates to M - I") {
        Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(81, 81);
        auto gr = grushin(b.M, I);
        REQUIRE(gr.converged);
        CHECK((gr.E_mp - (b.M - I)).norm() < 1e-12);
    }
    SUBCASE("series agrees with the bordered-matrix inverse") {
        auto gr = grushin(b.M, proj.R_V);
        REQUIRE(gr.converged);
        auto direct = grushin_direct(b.M, proj.R_V);
        CHECK((gr.E_mp - direct).norm() < 1e-9);
        CHECK(gr.offdiag_out < 1.0);  // the series actually contracts
    }
    SUBCASE("partial sums telescope to the full series") {
        auto terms = grushin_series_terms(b.M, proj.R_V, 40);
        REQUIRE_FALSE(terms.empty());
        Eigen::MatrixXcd acc = -(Eigen::MatrixXcd::Identity(proj.rank_V, proj.rank_V) -
                                 proj.R_V.adjoint() * b.M * proj.R_V);
        for (size_t k = 1; k < terms.size(); ++k) acc += terms[k];
        auto direct = grushin_direct(b.M, proj.R_V);
        CHECK((acc - direct).norm() < 1e-8);
    }
}

TEST_CASE("pencil eigenvalues, winding numbers and the zero-count bound") {
    SUBCASE("generalized eigenvalues of a diagonal pencil") {
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2, 2), B = A;
        A(0, 0) = cplx(2.0, 0.5);
        A(1, 1) = cplx(3.0, 0.0);
        B(0, 0) = 1.0;
        B(1, 1) = 1.0;
        auto ev = generalized_eigenvalues(A, B);
        for (cplx want : {A(0, 0), A(1, 1)}) {
            double best = std::min(std::abs(ev(0) - want), std::abs(ev(1) - want));
            CHECK(best < 1e-12);
        }
        B(1, 1) = 0.0;  // singular pencil: one eigenvalue escapes to infinity
        auto ev2 = generalized_eigenvalues(A, B);
        bool has_inf = std::isinf(std::abs(ev2(0))) || std::isinf(std::abs(ev2(1)));
        CHECK(has_inf);
    }
    SUBCASE("winding counts zeros with multiplicity") {
        auto f = [](cplx z) { return (z - 0.1) * (z - 0.3) * (z - 0.3); };
        CHECK(winding_number(f, 0.0, 0.5) == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(winding_number(f, 0.1, 0.05) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(winding_number(f, 0.7, 0.1) == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("log-max bound dominates the true zero count") {
        auto f3 = [](cplx z) { return z * z * z; };
        double b3 = jensen_count(f3, 2.0, cplx(0.9, 0.0));
        CHECK(b3 >= 3.0);
        auto f0 = [](cplx z) { return std::exp(z); };  // zero-free
        CHECK(jensen_count(f0, 2.0, cplx(0.0, 0.0)) >= 0.0);
        CHECK(jensen_count(f0, 2.0, cplx(0.0, 0.0)) < 15.0);
    }
}

TEST_CASE("microlocalization residuals") {
    auto b = open_baker(81);
    auto proj = coherent_projectors(b, 1.0);
    auto rep = hqmo_checks(b, proj);
    CHECK(rep.norm_identity < 1e-10);
    CHECK(rep.norm_proper < 0.15);      // truncation concentrated near the repeller
    CHECK(rep.norm_complement > 0.5);   // removing the active region destroys it
    CHECK(rep.norm_proper < rep.norm_complement);
}
