#pragma once
#include <string>
#include <vector>

#include "fwl/boundary.hpp"

namespace fwl {

struct Resonance {
    cplx k;
    int multiplicity = 1;
    double newton_residual = 0.0;  // size of the final Newton step
};

struct ResonanceOptions {
    int grid_re = 0;   // 0 = auto from region width
    int grid_im = 8;
    int m_max = -1;    // -1 = truncation rule
    bool use_symmetry = false;
    double newton_tol = 1e-11;
    int newton_max_iter = 40;
    double dedupe_tol = 1e-6;
    bool with_multiplicities = false;
    double spurious_tol = 1e-8;  // single-disc outgoing-wave zero filter
};

/// Zeros of det(I - M(k)) in the rectangle [re_min,re_max] x [im_min,im_max]:
/// coarse log-determinant grid scan, complex Newton refinement on
/// d/dk log det, deduplication, optional contour multiplicities.
std::vector<Resonance> find_resonances(const DiscSystem& sys, double re_min,
                                       double re_max, double im_min, double im_max,
                                       const ResonanceOptions& opt = {});

/// Argument-principle winding number of det(I - M(k)) around the circle
/// |k - k0| = radius.
int multiplicity_contour(const DiscSystem& sys, cplx k0, double radius,
                         const ResonanceOptions& opt = {}, int npts = 48);

/// log det(I - M(k)) through either the full build or the sector reduction.
cplx log_det_at(const DiscSystem& sys, cplx k, const ResonanceOptions& opt);

struct WeylFit {
    double alpha = 0.0;
    std::vector<double> r, N;             // cumulative counts in the alpha-strip
    double slope = 0.0, prefactor = 0.0;  // fit of log N vs log r
    std::vector<double> window_r, window_counts;  // unit windows [r, r+1)
    double window_slope = 0.0;
    bool fitted = false;
};

WeylFit weyl_fit(const std::vector<Resonance>& res, double alpha,
                 const std::vector<double>& r_values);

/// Coordinate converter between the wavenumber plane and the rescaled
/// spectral variable z = (i/h)(h^2 k^2 - 1).
cplx k_to_z(cplx k, double h);

void write_resonances_csv(const std::vector<Resonance>& res, const std::string& path);
std::vector<Resonance> read_resonances_csv(const std::string& path);

}  // namespace fwl
