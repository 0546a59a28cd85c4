#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fwl/geometry.hpp"

namespace fwl {

/// Boundary (Birkhoff) coordinates on the reduced phase space: disc index,
/// angular position s in [0, 2pi) along that disc, and tangential momentum
/// p = cos(phi) in [-1, 1].
struct PhasePoint {
    int disc = 0;
    double s = 0.0;
    double p = 0.0;
};

enum class StepKind { Forward, Shadow, Escaped };

struct StepResult {
    std::optional<PhasePoint> next;
    double flight_time = 0.0;
    StepKind kind = StepKind::Escaped;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Ambient-space realization of a phase point: boundary position, outward
/// normal, tangent and outgoing ray direction.
struct Ray {
    Vec2 x;    // boundary point
    Vec2 nu;   // outward normal
    Vec2 tau;  // tangent (d x / d s direction)
    Vec2 xi;   // outgoing unit direction, <nu, xi> >= 0
};

Ray lift(const DiscSystem& sys, const PhasePoint& rho);
PhasePoint project(const DiscSystem& sys, int disc, const Vec2& hit, const Vec2& xi);

/// One application of the billiard relation: follow the outgoing ray of rho to
/// the first disc hit and reflect there (illuminated side). Escaped if no disc
/// is hit.
StepResult step(const DiscSystem& sys, const PhasePoint& rho);

/// The shadow companion B^-: same ray, but the arrival point is the far
/// (occluded) intersection of the first disc hit, taken without reflection.
StepResult step_shadow(const DiscSystem& sys, const PhasePoint& rho);

/// Momentum reversal J(rho) = (disc, s, -p); conjugating F by it yields F^{-1}.
PhasePoint involution(const PhasePoint& rho);

/// Inverse billiard step, J o F o J.
StepResult step_back(const DiscSystem& sys, const PhasePoint& rho);

/// Tangent map dF at rho in (s, p) coordinates, computed analytically from the
/// flight length and the curvature of the receiving disc. Requires that
/// step(sys, rho) is Forward.
Mat2 jacobian(const DiscSystem& sys, const PhasePoint& rho);

/// Central finite-difference Jacobian, used as an independent cross-check.
Mat2 jacobian_fd(const DiscSystem& sys, const PhasePoint& rho, double h = 1e-6);

/// Finite-depth trapped-set approximation: grid points of B*dO surviving
/// `depth` forward and `depth` backward steps.
struct TrappedSample {
    int depth = 0;
    int ns = 0;  // grid resolution in s (per disc)
    int np = 0;  // grid resolution in p
    std::vector<PhasePoint> points;
};

TrappedSample trapped_sample(const DiscSystem& sys, int depth, int ns, int np);

/// Points surviving `depth` steps in one direction only (samples of the
/// incoming tail T_- for forward survival, outgoing tail T_+ for backward).
TrappedSample tail_sample(const DiscSystem& sys, int depth, int ns, int np,
                          bool forward);

/// Axis-aligned boxes in one disc chart; a region is a union of boxes.
struct PhaseBox {
    int disc = 0;
    double s_lo = 0, s_hi = 0;
    double p_lo = 0, p_hi = 0;
    bool contains(const PhasePoint& rho) const;
};

struct PhaseRegion {
    std::vector<PhaseBox> boxes;
    bool contains(const PhasePoint& rho) const;
};

/// min{k >= 1 : F^k(rho) leaves the region}; escape counts as leaving.
/// Returns cap+1 as the trapped sentinel when the orbit stays `cap` steps.
int escape_time(const DiscSystem& sys, const PhasePoint& rho,
                const PhaseRegion& region, int cap);

/// CSV and binary export of trapped samples (see README for the format).
void write_sample_csv(const TrappedSample& sample, const std::string& path);
void write_sample_grid(const DiscSystem& sys, const TrappedSample& sample,
                       const std::string& path);

}  // namespace fwl
