#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "fwl/billiard.hpp"

namespace fwl {

/// Uniform cell-centered axis: n cells covering [lo, hi].
struct GridAxis {
    double lo = 0, hi = 0;
    int n = 0;
    double spacing() const { return (hi - lo) / n; }
    double center(int i) const { return lo + (i + 0.5) * spacing(); }
};

/// Real-valued function sampled on per-disc rectangles in (s, p), with an
/// optional validity mask (points whose defining orbit segment left the
/// domain are masked out).
struct GridFunction {
    struct Chart {
        int disc = 0;
        GridAxis s, p;
        std::vector<double> v;
        std::vector<uint8_t> mask;  // 1 = valid

        size_t idx(int is, int ip) const {
            return static_cast<size_t>(is) * p.n + ip;
        }
        PhasePoint point(int is, int ip) const {
            return {disc, s.center(is), p.center(ip)};
        }
    };
    double epsilon = 0.0;
    std::vector<Chart> charts;

    size_t total_cells() const;
    size_t valid_cells() const;
};

/// Binary round-trip format; see README for the layout.
void write_grid(const GridFunction& g, const std::string& path);
GridFunction read_grid(const std::string& path);

/// CSV: disc,s,p,value rows, masked cells omitted.
void write_grid_csv(const GridFunction& g, const std::string& path);

}  // namespace fwl
