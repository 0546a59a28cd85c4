#pragma once
#include <string>
#include <vector>

#include "fwl/orbits.hpp"

namespace fwl {

struct DimensionEstimate {
    enum class Method { BoxCount, Pressure };
    Method method = Method::BoxCount;
    double dim = 0.0;  // dimension of the trapped set in the reduced phase space
    double mu = 0.0;   // dim / 2, the per-factor (stable or unstable) dimension
    std::vector<double> scales;
    std::vector<double> counts;  // N(eps) for BoxCount; |Z_p residual| for Pressure
    double r2 = 0.0;
    double slope_stderr = 0.0;
    bool pure_dim = true;  // adjacent-pair slopes consistent within tolerance
};

struct EscapeRate {
    double gamma0_per_length = 0.0;
    double gamma0_per_bounce = 0.0;
};

/// Least-squares slope of log N(eps) against log(1/eps), where N(eps) counts
/// occupied eps-boxes of the sample in (s, p) over all disc charts.
/// Requires at least 4 scales spanning at least 1.5 decades.
DimensionEstimate box_dimension(const TrappedSample& sample,
                                const std::vector<double>& scales);

/// Root s* of the topological pressure condition P(-s log Lambda) = 0,
/// located as the zero of the cycle-expanded dynamical zeta function
/// 1/zeta(s) = prod_prime (1 - Lambda_p^{-s}) truncated at total period
/// max_period. Returns dim = 2 s*.
DimensionEstimate pressure_dimension(const std::vector<PeriodicOrbit>& orbits,
                                     int max_period);

/// Classical escape rate: gamma0 per unit length solves the cycle-expanded
/// condition prod_prime (1 - e^{gamma l_p} / Lambda_p) = 0; per bounce
/// analogously with e^{gamma n_p}.
EscapeRate escape_rate(const std::vector<PeriodicOrbit>& orbits, int max_period);

/// JSON text of the estimate (and optional escape rate) for the CLI report.
std::string dimension_report_json(const DimensionEstimate& est,
                                  const EscapeRate* rate = nullptr);

}  // namespace fwl
