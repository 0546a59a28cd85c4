#pragma once
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fwl/grid.hpp"

namespace fwl {

struct EscapeParams {
    double epsilon = 1e-2;
    double M = 1000.0;   // flattening constant in the log-regularized quotient
    int K = 6;           // iteration depth of the summed distance functions
    double C5 = 0.0;     // gluing weight; 0 = auto (10 x empirical sup of |Ghat|)
    double delta = 0.10;  // Whitney separation parameter, must be < 1/9
    int tail_depth = 8;  // survival depth defining the tail samples
    int escape_cap = 60;
    double tail_radius = 0.12;  // half-width of the tail neighbourhoods V+-
    double C1 = 2.0;  // escape threshold: far set is {d(.,T)^2 >= C1*eps}
    double t = 1.0;   // conjugation strength exp(tG) used by downstream norms
};

/// Regularized squared distance to a closed set Gamma (given as a finite
/// sample): phi(x) = eps + sum over a maximal relatively-separated family of
/// centers x_j off Gamma, of d(x_j,Gamma)^2 * bump((x - x_j)/(d_j + sqrt(eps))),
/// restricted to centers with d_j > sqrt(eps). Comparable to eps + d(x,Gamma)^2.
class WhitneyFunction {
public:
    WhitneyFunction(const DiscSystem& sys, std::vector<PhasePoint> gamma,
                    double epsilon, double delta, double center_spacing);

    double eval(const PhasePoint& x) const;
    /// distance to the Gamma sample; beyond `cap` the search stops early and
    /// a large sentinel is returned
    double dist(const PhasePoint& x, double cap = 16.0) const;
    int overlap_count(const PhasePoint& x) const; // # bump supports containing x
    size_t center_count() const { return centers_.size(); }
    double epsilon() const { return eps_; }

private:
    struct Center {
        PhasePoint x;
        double d;  // distance to Gamma
    };
    double query(const PhasePoint& x, bool count_only, int* overlap) const;

    int ncharts_ = 0;
    double eps_ = 0, delta_ = 0;
    std::vector<PhasePoint> gamma_;
    std::vector<Center> centers_;
    // bucket structures (per disc) for Gamma points and for centers grouped by
    // support-radius class
    struct Buckets;
    std::shared_ptr<Buckets> idx_;
};

/// Nested rectangles W1 c W2 c W3 c W4 around the trapped set, one box per
/// disc chart.
struct NestedBoxes {
    PhaseRegion W1, W2, W3, W4;
};

/// The full escape-function construction for one disc system and one epsilon:
/// tail samples, Whitney regularizations, summed one-sided functions, the
/// log-flattened quotient, the cover-based far-field function and the glued
/// global function. All evaluators work at arbitrary phase points; nullopt
/// means the defining orbit segment escapes (point masked).
class EscapeLab {
public:
    EscapeLab(const DiscSystem& sys, const EscapeParams& params);

    const EscapeParams& params() const { return par_; }
    const DiscSystem& system() const { return sys_; }
    const NestedBoxes& W() const { return W_; }
    const WhitneyFunction& whitney_plus() const { return *wh_plus_; }
    const WhitneyFunction& whitney_minus() const { return *wh_minus_; }
    const std::vector<PhasePoint>& trapped_points() const { return trap_; }
    const std::vector<PhaseBox>& domain() const { return domain_; }

    std::optional<double> phi_hat_plus(const PhasePoint& rho) const;
    std::optional<double> phi_hat_minus(const PhasePoint& rho) const;
    std::optional<double> g_hat(const PhasePoint& rho) const;
    /// Saturated variants: once the orbit escapes, the remaining summands are
    /// frozen at the far-field value, standing in for a smooth extension of
    /// the map. Defined everywhere; they agree with the masked versions on
    /// the unmasked set.
    double phi_hat_plus_sat(const PhasePoint& rho) const;
    double phi_hat_minus_sat(const PhasePoint& rho) const;
    double g_hat_sat(const PhasePoint& rho) const;
    double g_plus(const PhasePoint& rho) const;
    double g_minus(const PhasePoint& rho) const;
    double g0(const PhasePoint& rho) const;
    double chi(const PhasePoint& rho) const;  // gluing cutoff, 1 on W2 u F(W2)
    std::optional<double> G(const PhasePoint& rho) const;
    double C5_effective() const { return c5_; }

    /// distance to the trapped sample and to the tails (capped searches; all
    /// thresholds compared against these are well below the cap)
    double dist_T(const PhasePoint& rho) const;
    double dist_Tplus(const PhasePoint& rho) const {
        return wh_plus_->dist(rho, 0.5);
    }
    double dist_Tminus(const PhasePoint& rho) const {
        return wh_minus_->dist(rho, 0.5);
    }

    bool in_Vminus(const PhasePoint& rho) const;
    bool in_Vplus(const PhasePoint& rho) const;
    /// neighbourhood of the trapped set where g0 vanishes by construction
    /// (both tail distances below a third of the exclusion radius)
    bool in_vanishing_core(const PhasePoint& rho) const;

    /// Sample an evaluator over the lab domain at spacing sqrt(eps)/4 (or the
    /// given spacing); masked where the evaluator returns nullopt.
    GridFunction sample(
        const std::function<std::optional<double>(const PhasePoint&)>& f,
        double spacing = 0.0) const;

private:
    struct CoverCenter {
        PhasePoint x;
        int n_escape;  // steps until leaving W4 in the construction direction
    };
    double one_sided(const std::vector<CoverCenter>& centers, bool forward,
                     const PhasePoint& rho) const;
    void build_cover(bool forward, std::vector<CoverCenter>& out) const;

    DiscSystem sys_;
    EscapeParams par_;
    std::vector<PhasePoint> trap_, tail_plus_, tail_minus_;
    std::unique_ptr<WhitneyFunction> wh_plus_, wh_minus_;
    struct PointIndex;
    std::shared_ptr<PointIndex> trap_idx_;
    NestedBoxes W_;
    std::vector<PhaseBox> domain_;
    std::vector<CoverCenter> cover_fwd_, cover_bwd_;
    std::shared_ptr<PointIndex> cover_fwd_idx_, cover_bwd_idx_;
    int max_n_fwd_ = 0, max_n_bwd_ = 0;
    double cover_spacing_ = 0.05;
    double c5_ = 0.0;
    double sat_plus_ = 0.0, sat_minus_ = 0.0;  // far-field summand caps
};

/// One verified inequality over a grid sweep: number of points checked,
/// violations, and the worst margin (negative margin = violation) with the
/// point attaining it.
struct IneqCheck {
    std::string name;
    int checked = 0;
    int violations = 0;
    double worst_margin = 1e18;
    PhasePoint worst_at{};
    bool ok() const { return violations == 0; }
};

/// Result of the full inequality suite for one EscapeLab: every bound checked
/// at all unmasked grid points, plus the empirically realized constants.
struct EscapeReport {
    double epsilon = 0;
    int K = 0;
    int unmasked = 0;  // fine-grid points entering the checks
    int masked = 0;    // fine-grid points excluded (orbit leaves the domain)
    std::vector<IneqCheck> checks;
    std::vector<std::pair<std::string, double>> constants;
    bool all_ok() const;
    const IneqCheck* find(const std::string& name) const;
};

/// Runs the whole inequality suite on grids at the lab's epsilon: monotone
/// escape and sum equivalence for the summed distance functions, the
/// flattened-quotient bounds, the far-field increment bounds, the glued
/// function bounds and the order-function fit.
EscapeReport verify_escape(const EscapeLab& lab);

std::string escape_report_json(const EscapeReport& rep);

/// Verifies the escape mechanism of the linear dilation model
/// (x, xi) -> (Lambda x, xi / Lambda) with G = x^2 - xi^2.
struct LinearModelReport {
    bool ok = false;
    double min_coercivity = 0.0;  // min over samples of increment / (x^2 + xi^2)
    double expected_coercivity = 0.0;
};
LinearModelReport linear_model_check(double lambda, int samples = 1000,
                                     unsigned seed = 1);

/// Smoothstep with two continuous derivatives: 0 for t <= 0, 1 for t >= 1.
double smoothstep(double t);

}  // namespace fwl
