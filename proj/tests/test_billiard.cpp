#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "fwl/billiard.hpp"

using namespace fwl;

static std::string cfg(const char* name) {
    return std::string(FWL_CONFIG_DIR) + "/" + name;
}

static DiscSystem two_discs() { return load_system_file(cfg("two_discs.cfg")); }
static DiscSystem equilateral() {
    return load_system_file(cfg("equilateral_d3.cfg"));
}

TEST_CASE("lift/project round trip") {
    auto sys = equilateral();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> us(0, 2 * M_PI), up(-0.99, 0.99);
    for (int i = 0; i < 200; ++i) {
        PhasePoint rho{static_cast<int>(rng() % 3), us(rng), up(rng)};
        Ray r = lift(sys, rho);
        CHECK(norm(r.xi) == doctest::Approx(1.0));
        CHECK(dot(r.nu, r.xi) >= 0.0);
        PhasePoint back = project(sys, rho.disc, r.x, r.xi);
        CHECK(back.disc == rho.disc);
        CHECK(back.s == doctest::Approx(rho.s).epsilon(1e-12));
        CHECK(back.p == doctest::Approx(rho.p).epsilon(1e-12));
    }
}

TEST_CASE("two-disc axial bounce: closed-form step, shadow and escape") {
    auto sys = two_discs();  // unit discs, centers at 0 and 3: gap length 1

    // facing point: normal ray from (1,0) hits disc 1 head-on after length 1
    PhasePoint rho{0, 0.0, 0.0};
    auto st = step(sys, rho);
    REQUIRE(st.kind == StepKind::Forward);
    REQUIRE(st.next.has_value());
    CHECK(st.next->disc == 1);
    CHECK(std::abs(std::remainder(st.next->s - M_PI, 2 * M_PI)) < 1e-12);
    CHECK(st.next->p == doctest::Approx(0.0));
    CHECK(st.flight_time == doctest::Approx(1.0));

    // the shadow companion continues to the occluded far intersection (4,0)
    auto sh = step_shadow(sys, rho);
    REQUIRE(sh.kind == StepKind::Shadow);
    REQUIRE(sh.next.has_value());
    CHECK(sh.next->disc == 1);
    CHECK(std::abs(std::remainder(sh.next->s, 2 * M_PI)) < 1e-12);
    CHECK(sh.flight_time == doctest::Approx(3.0));

    // pointing away from everything escapes
    auto esc = step(sys, PhasePoint{0, M_PI, 0.0});
    CHECK(esc.kind == StepKind::Escaped);
    CHECK_FALSE(esc.next.has_value());
}

TEST_CASE("involution conjugates the map to its inverse") {
    auto sys = equilateral();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> us(0, 2 * M_PI), up(-0.95, 0.95);
    int tested = 0;
    for (int i = 0; i < 2000 && tested < 300; ++i) {
        PhasePoint rho{static_cast<int>(rng() % 3), us(rng), up(rng)};
        auto in = involution(involution(rho));
        CHECK(in.s == rho.s);
        CHECK(in.p == rho.p);
        auto fwd = step(sys, rho);
        if (fwd.kind != StepKind::Forward) continue;
        auto back = step_back(sys, *fwd.next);
        REQUIRE(back.kind == StepKind::Forward);
        CHECK(back.next->disc == rho.disc);
        CHECK(std::abs(std::remainder(back.next->s - rho.s, 2 * M_PI)) < 1e-10);
        CHECK(std::abs(back.next->p - rho.p) < 1e-10);
        CHECK(back.flight_time == doctest::Approx(fwd.flight_time).epsilon(1e-10));
        ++tested;
    }
    CHECK(tested >= 300);
}

TEST_CASE("tangent map: symplectic and consistent with finite differences") {
    auto sys = equilateral();
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> us(0, 2 * M_PI), up(-0.9, 0.9);
    int tested = 0;
    for (int i = 0; i < 20000 && tested < 1000; ++i) {
        PhasePoint rho{static_cast<int>(rng() % 3), us(rng), up(rng)};
        if (step(sys, rho).kind != StepKind::Forward) continue;
        Mat2 A = jacobian(sys, rho);
        double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
        CHECK(std::abs(det - 1.0) < 1e-8);
        Mat2 B = jacobian_fd(sys, rho);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                CHECK(std::abs(A[r][c] - B[r][c]) <
                      1e-5 * std::max(1.0, std::abs(A[r][c])));
        ++tested;
    }
    CHECK(tested >= 1000);
}

TEST_CASE("survivor sets are nested in the depth") {
    // tail samples live on a fixed grid, so deeper survivor sets must be
    // literal subsets of shallower ones, separately in each direction
    auto sys = equilateral();
    using Key = std::tuple<int, double, double>;
    for (bool forward : {true, false}) {
        std::set<Key> prev;
        for (int depth = 1; depth <= 10; ++depth) {
            auto ts = tail_sample(sys, depth, 90, 45, forward);
            std::set<Key> cur;
            for (const auto& q : ts.points) cur.insert({q.disc, q.s, q.p});
            if (depth > 1) {
                CHECK(cur.size() <= prev.size());
                for (const auto& k : cur) CHECK(prev.count(k) == 1);
            }
            CHECK_FALSE(cur.empty());
            prev = std::move(cur);
        }
    }
}

TEST_CASE("refined trapped sample points really survive both ways") {
    auto sys = equilateral();
    for (int depth : {2, 5}) {
        auto ts = trapped_sample(sys, depth, 72, 36);
        REQUIRE_FALSE(ts.points.empty());
        for (const auto& q : ts.points) {
            PhasePoint f = q, b = q;
            for (int k = 0; k < depth; ++k) {
                auto sf = step(sys, f);
                auto sb = step_back(sys, b);
                REQUIRE(sf.kind == StepKind::Forward);
                REQUIRE(sb.kind == StepKind::Forward);
                f = *sf.next;
                b = *sb.next;
            }
        }
    }
}

TEST_CASE("tail samples contain the two-sided sample and respect direction") {
    auto sys = equilateral();
    const int depth = 4, ns = 72, np = 36;
    auto fwd = tail_sample(sys, depth, ns, np, true);
    auto bwd = tail_sample(sys, depth, ns, np, false);
    using Key = std::tuple<int, double, double>;
    std::set<Key> f, b;
    for (const auto& q : fwd.points) f.insert({q.disc, q.s, q.p});
    for (const auto& q : bwd.points) b.insert({q.disc, q.s, q.p});
    size_t common = 0;
    for (const auto& k : f) common += b.count(k);
    CHECK(common > 0);            // two-sided survivors sit in both tails
    CHECK(f.size() > common);     // and each tail is strictly larger
    CHECK(b.size() > common);
    // momentum reversal maps one tail onto the other, so the counts agree
    CHECK(f.size() == b.size());
    // every one-sided survivor really survives its defining direction
    for (const auto& q : fwd.points) {
        PhasePoint r = q;
        for (int k = 0; k < depth; ++k) {
            auto st = step(sys, r);
            REQUIRE(st.kind == StepKind::Forward);
            r = *st.next;
        }
    }
    for (const auto& q : bwd.points) {
        PhasePoint r = q;
        for (int k = 0; k < depth; ++k) {
            auto st = step_back(sys, r);
            REQUIRE(st.kind == StepKind::Forward);
            r = *st.next;
        }
    }
}

TEST_CASE("escape time: immediate leaver and trapped sentinel") {
    auto sys = two_discs();
    PhaseRegion all;
    for (int d = 0; d < 2; ++d)
        all.boxes.push_back({d, 0.0, 2 * M_PI, -1.0, 1.0});
    // pointing away: escapes on the first step
    CHECK(escape_time(sys, {0, M_PI, 0.0}, all, 30) == 1);
    // the axial bouncing orbit never leaves: sentinel cap + 1
    CHECK(escape_time(sys, {0, 0.0, 0.0}, all, 30) == 31);
    // a region excluding disc 1 is left as soon as the orbit lands there
    PhaseRegion only0;
    only0.boxes.push_back({0, 0.0, 2 * M_PI, -1.0, 1.0});
    CHECK(escape_time(sys, {0, 0.0, 0.0}, only0, 30) == 1);
}
