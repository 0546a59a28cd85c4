#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "fwl/grid.hpp"

using namespace fwl;

namespace {

GridFunction make_sample(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uv(-5.0, 5.0);
    GridFunction g;
    g.epsilon = 2.5e-3;
    for (int disc = 0; disc < 2; ++disc) {
        GridFunction::Chart c;
        c.disc = disc;
        c.s = {0.25, 1.75, 12};
        c.p = {-0.8, 0.8, 7};
        c.v.resize(static_cast<size_t>(c.s.n) * c.p.n);
        c.mask.resize(c.v.size());
        for (size_t i = 0; i < c.v.size(); ++i) {
            c.v[i] = uv(rng);
            c.mask[i] = (rng() % 4 != 0);  // a quarter of the cells masked
        }
        g.charts.push_back(std::move(c));
    }
    return g;
}

struct TempFile {
    std::string path;
    explicit TempFile(const char* name) {
        path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
               "/" + name;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("axis arithmetic") {
    GridAxis a{0.0, 2.0, 8};
    CHECK(a.spacing() == doctest::Approx(0.25));
    CHECK(a.center(0) == doctest::Approx(0.125));
    CHECK(a.center(7) == doctest::Approx(1.875));
}

TEST_CASE("cell bookkeeping counts masked cells") {
    auto g = make_sample(3);
    size_t total = 0, valid = 0;
    for (const auto& c : g.charts)
        for (size_t i = 0; i < c.v.size(); ++i) {
            ++total;
            if (c.mask[i]) ++valid;
        }
    CHECK(g.total_cells() == total);
    CHECK(g.valid_cells() == valid);
    CHECK(valid < total);
}

TEST_CASE("binary round trip is exact") {
    auto g = make_sample(17);
    TempFile f("fwl_grid_roundtrip.bin");
    write_grid(g, f.path);
    auto h = read_grid(f.path);
    CHECK(h.epsilon == g.epsilon);
    REQUIRE(h.charts.size() == g.charts.size());
    for (size_t k = 0; k < g.charts.size(); ++k) {
        const auto &a = g.charts[k], &b = h.charts[k];
        CHECK(b.disc == a.disc);
        CHECK(b.s.lo == a.s.lo);
        CHECK(b.s.hi == a.s.hi);
        CHECK(b.s.n == a.s.n);
        CHECK(b.p.lo == a.p.lo);
        CHECK(b.p.hi == a.p.hi);
        CHECK(b.p.n == a.p.n);
        REQUIRE(b.v.size() == a.v.size());
        for (size_t i = 0; i < a.v.size(); ++i) {
            CHECK(b.v[i] == a.v[i]);  // bitwise, no tolerance
            CHECK(b.mask[i] == a.mask[i]);
        }
    }
}

TEST_CASE("reader rejects foreign files") {
    TempFile f("fwl_grid_bogus.bin");
    std::ofstream(f.path) << "definitely not a grid file";
    CHECK_THROWS(read_grid(f.path));
    CHECK_THROWS(read_grid("/nonexistent/path/grid.bin"));
}

TEST_CASE("CSV export omits masked cells") {
    auto g = make_sample(29);
    TempFile f("fwl_grid.csv");
    write_grid_csv(g, f.path);
    std::ifstream in(f.path);
    size_t rows = 0;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.find("disc") != std::string::npos) {
            header_seen = true;
            continue;
        }
        ++rows;
    }
    CHECK(rows == g.valid_cells());
    CHECK(header_seen);
}
