#pragma once
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fwl/vec2.hpp"

namespace fwl {

struct Disc {
    Vec2 center;
    double radius = 0.0;
};

/// Error thrown when a configuration file cannot be parsed.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Error thrown when a disc system violates a geometric invariant
/// (non-positive radius, overlapping closures).
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A system of J non-overlapping discs in the plane. Immutable after
/// construction; the constructor enforces positive radii and pairwise
/// disjoint closures.
class DiscSystem {
public:
    explicit DiscSystem(std::vector<Disc> discs);

    int count() const { return static_cast<int>(discs_.size()); }
    const Disc& disc(int j) const { return discs_.at(j); }
    const std::vector<Disc>& discs() const { return discs_; }
    double max_radius() const;

private:
    std::vector<Disc> discs_;
};

struct IkawaViolation {
    int k = 0;  // eclipsed/eclipsing disc
    int j = 0;
    int l = 0;  // hull endpoints
    double hull_distance = 0.0;  // dist(disc k, hull(disc j, disc l)); <= 0 means violation
};

struct IkawaReport {
    bool satisfied = true;
    std::vector<IkawaViolation> violations;
};

/// Parse the plain-text disc configuration format:
///   # comment
///   disc = cx cy radius
///   equilateral D a        (3 discs of radius a, centers on an equilateral
///                           triangle of side D)
///   two_discs D a          (2 discs of radius a, centers distance D apart on
///                           the x axis)
DiscSystem load_system(const std::string& config_text);
DiscSystem load_system_file(const std::string& path);

/// Signed distance from a point to the convex hull of two discs
/// (the varying-radius capsule swept between them). Negative inside.
double point_to_two_disc_hull(const Vec2& q, const Disc& a, const Disc& b);

/// Check the no-eclipse condition: no disc meets the convex hull of any
/// other pair. Vacuously satisfied for J <= 2.
IkawaReport check_ikawa(const DiscSystem& sys);

}  // namespace fwl
