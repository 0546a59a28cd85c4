#pragma once
#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace fwl {

using cplx = std::complex<double>;

struct TorusPoint {
    double q = 0, p = 0;
};

/// Quantized open baker with the middle third as the hole: the inverse
/// N-point discrete Fourier transform composed with diag(F_{N/3}, 0, F_{N/3}).
struct OpenMapBundle {
    int N = 0;
    Eigen::MatrixXcd M;
    std::vector<TorusPoint> trapped_samples;  // middle-third Cantor repeller
    double htilde = 1.0;
    int cantor_depth = 0;
};

OpenMapBundle open_baker(int N);

/// Dense eigenvalues via LAPACK.
Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& A);

/// Periodized Gaussian coherent state at (q0, p0), unit-normalized.
Eigen::VectorXcd coherent_state(int N, double q0, double p0);

struct ProjectorPair {
    Eigen::MatrixXcd Pi_V, Pi_h;
    Eigen::MatrixXcd R_V;  // orthonormal basis of ran(Pi_V), N x rank_V
    int rank_V = 0, rank_h = 0;
    int lattice_V = 0, lattice_h = 0;
};

/// Pi_V projects onto the span of coherent states on a lattice of spacing
/// sqrt(1/(N htilde)) covering a one-spacing neighbourhood of the trapped
/// samples; Pi_h uses spacing 1/sqrt(N) over a fixed-size neighbourhood.
ProjectorPair coherent_projectors(const OpenMapBundle& bundle, double htilde,
                                  double h_neighbourhood = 0.1);

/// Anti-Wick quantization of a torus function: weighted coherent-state sum
/// over a sqrt(1/N)-lattice, Hermitized.
Eigen::MatrixXcd anti_wick(int N, const std::function<double(double, double)>& g);

/// exp(-t G) M exp(t G) with G Hermitian (exponential by eigendecomposition).
Eigen::MatrixXcd weight_conjugate(const Eigen::MatrixXcd& M,
                                  const Eigen::MatrixXcd& G, double t);

struct GrushinResult {
    Eigen::MatrixXcd E_mp;
    int series_terms_used = 0;
    double offdiag_out = 0, offdiag_in = 0;  // ||(I-Pi)M||, ||M(I-Pi)||
    bool converged = false;
};

/// Effective Hamiltonian on ran(Pi): series
/// -(I - R* M R) + sum_k R* M [(I-Pi) M]^k R, truncated at term norm 1e-12.
/// R is an orthonormal basis of ran(Pi).
GrushinResult grushin(const Eigen::MatrixXcd& M, const Eigen::MatrixXcd& R);

/// Oracle: the same block from direct inversion of the bordered matrix
/// [[I - M, R], [R*, 0]].
Eigen::MatrixXcd grushin_direct(const Eigen::MatrixXcd& M,
                                const Eigen::MatrixXcd& R);

/// Partial sums T_k = R* M [(I-Pi) M]^k R of the series, useful for
/// evaluating E_mp along one-parameter families M(z) = c(z) M cheaply.
std::vector<Eigen::MatrixXcd> grushin_series_terms(const Eigen::MatrixXcd& M,
                                                   const Eigen::MatrixXcd& R,
                                                   int max_terms);

/// Generalized eigenvalues of the pencil (A - z B) x = 0 via LAPACK;
/// infinite eigenvalues come back as inf.
Eigen::VectorXcd generalized_eigenvalues(const Eigen::MatrixXcd& A,
                                         const Eigen::MatrixXcd& B);

/// Winding number of f around the circle |z - z0| = radius.
double winding_number(const std::function<cplx(cplx)>& f, cplx z0, double radius,
                      int npts = 256);

/// Upper bound on the number of zeros of f in D(0, R/2) from the maximum of
/// log|f| on |z| = R and the value at a base point in D(0, R/2):
/// n <= (max log|f| - log|f(z_base)|) / log(3/2). Samples are doubled until
/// the circle maximum is stable to 1e-6 relatively.
double jensen_count(const std::function<cplx(cplx)>& f, double R, cplx z_base);

struct HqmoReport {
    double norm_identity = 0;    // A = I, must vanish
    double norm_proper = 0;      // A = cutoff near T inside the departure set
    double norm_complement = 0;  // cutoff supported off the departure set
};

/// Microlocalization check of the truncated map: ||Pi_h M Pi_h (I - A)||
/// for anti-Wick cutoffs A.
HqmoReport hqmo_checks(const OpenMapBundle& bundle, const ProjectorPair& proj);

}  // namespace fwl
