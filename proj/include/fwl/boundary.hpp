#pragma once
#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "fwl/cbessel.hpp"
#include "fwl/geometry.hpp"

namespace fwl {

/// Inter-disc boundary operator at complex wavenumber k, acting on stacked
/// angular coefficient vectors (orders -m_max..m_max per disc). Diagonal
/// blocks are zero; block (i,j) propagates the outgoing wave of disc j to the
/// surface of disc i and folds in the Dirichlet reflection ratio of disc i.
struct BoundaryOperator {
    cplx k;
    int m_max = 0;
    Eigen::MatrixXcd M;
    int block_size() const { return 2 * m_max + 1; }
};

/// Default angular truncation for the given wavenumber.
int truncation_order(const DiscSystem& sys, cplx k);

BoundaryOperator build_M(const DiscSystem& sys, cplx k, int m_max = -1);

/// log det(I - M): real part exact, imaginary part modulo 2*pi (continuous
/// tracking is done by the caller along paths).
cplx log_det_I_minus(const Eigen::MatrixXcd& M);

/// True if rotating the system by 2*pi/J about the centroid maps disc j to
/// disc j+1 (cyclic symmetry usable for sector reduction).
bool has_cyclic_symmetry(const DiscSystem& sys, double tol = 1e-9);

/// Sector blocks M_l (l = 0..J-1) of the cyclic symmetry reduction;
/// det(I - M) = prod_l det(I - M_l).
std::vector<Eigen::MatrixXcd> cyclic_sector_blocks(const DiscSystem& sys, cplx k,
                                                   int m_max = -1);

/// log det(I - M) via the sector decomposition (fails if no symmetry).
cplx log_det_I_minus_cyclic(const DiscSystem& sys, cplx k, int m_max = -1);

}  // namespace fwl
