#include "fwl/open_map.hpp"

#include <cmath>
#include <stdexcept>

extern "C" {
void zgeev_(const char* jobvl, const char* jobvr, const int* n,
            std::complex<double>* a, const int* lda, std::complex<double>* w,
            std::complex<double>* vl, const int* ldvl, std::complex<double>* vr,
            const int* ldvr, std::complex<double>* work, const int* lwork,
            double* rwork, int* info);
void zggev_(const char* jobvl, const char* jobvr, const int* n,
            std::complex<double>* a, const int* lda, std::complex<double>* b,
            const int* ldb, std::complex<double>* alpha, std::complex<double>* beta,
            std::complex<double>* vl, const int* ldvl, std::complex<double>* vr,
            const int* ldvr, std::complex<double>* work, const int* lwork,
            double* rwork, int* info);
}

namespace fwl {

namespace {

Eigen::MatrixXcd dft(int n) {
    Eigen::MatrixXcd F(n, n);
    double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            F(j, k) = s * std::exp(cplx(0, -2.0 * M_PI * j * k / n));
    return F;
}

double torus_d(double a, double b) {
    double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

double torus_dist(const TorusPoint& a, const TorusPoint& b) {
    double dq = torus_d(a.q, b.q), dp = torus_d(a.p, b.p);
    return std::sqrt(dq * dq + dp * dp);
}

}  // namespace

OpenMapBundle open_baker(int N) {
    if (N <= 0 || N % 3 != 0)
        throw std::invalid_argument("open baker needs N divisible by 3");
    OpenMapBundle b;
    b.N = N;
    int n3 = N / 3;
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(N, N);
    Eigen::MatrixXcd F3 = dft(n3);
    D.block(0, 0, n3, n3) = F3;
    D.block(2 * n3, 2 * n3, n3, n3) = F3;
    b.M = dft(N).adjoint() * D;

    b.cantor_depth = std::max(1, static_cast<int>(std::round(std::log(N) / std::log(3.0))));
    int d = std::min(b.cantor_depth, 7);  // 4^7 pairs is plenty as a sample
    std::vector<double> xs;
    for (int mask = 0; mask < (1 << d); ++mask) {
        double x = 0, w = 1.0 / 3.0;
        for (int i = 0; i < d; ++i) {
            if (mask & (1 << i)) x += 2 * w;
            w /= 3.0;
        }
        xs.push_back(x + 1.5 * w);  // interval center at depth d
    }
    for (double q : xs)
        for (double p : xs) b.trapped_samples.push_back({q, p});
    return b;
}

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& A) {
    int n = static_cast<int>(A.rows());
    Eigen::MatrixXcd a = A;
    Eigen::VectorXcd w(n);
    int lwork = 4 * n, info = 0;
    std::vector<cplx> work(lwork);
    std::vector<double> rwork(2 * n);
    zgeev_("N", "N", &n, a.data(), &n, w.data(), nullptr, &n, nullptr, &n,
           work.data(), &lwork, rwork.data(), &info);
    if (info != 0) throw std::runtime_error("zgeev failed");
    return w;
}

Eigen::VectorXcd generalized_eigenvalues(const Eigen::MatrixXcd& A,
                                         const Eigen::MatrixXcd& B) {
    int n = static_cast<int>(A.rows());
    Eigen::MatrixXcd a = A, b = B;
    Eigen::VectorXcd alpha(n), beta(n), out(n);
    int lwork = 4 * n, info = 0;
    std::vector<cplx> work(lwork);
    std::vector<double> rwork(8 * n);
    zggev_("N", "N", &n, a.data(), &n, b.data(), &n, alpha.data(), beta.data(),
           nullptr, &n, nullptr, &n, work.data(), &lwork, rwork.data(), &info);
    if (info != 0) throw std::runtime_error("zggev failed");
    for (int i = 0; i < n; ++i) {
        if (std::abs(beta(i)) < 1e-300)
            out(i) = cplx(INFINITY, 0);
        else
            out(i) = alpha(i) / beta(i);
    }
    return out;
}

Eigen::VectorXcd coherent_state(int N, double q0, double p0) {
    Eigen::VectorXcd v(N);
    for (int j = 0; j < N; ++j) {
        cplx sum = 0;
        for (int w = -3; w <= 3; ++w) {
            double x = static_cast<double>(j) / N + w;
            double g = -M_PI * N * (x - q0) * (x - q0);
            if (g < -700) continue;
            sum += std::exp(cplx(g, 2.0 * M_PI * N * p0 * x));
        }
        v(j) = sum;
    }
    double n = v.norm();
    if (n == 0) throw std::runtime_error("degenerate coherent state");
    return v / n;
}

namespace {

std::vector<TorusPoint> lattice_near(const std::vector<TorusPoint>& targets,
                                     double spacing, double radius) {
    int n = std::max(1, static_cast<int>(std::round(1.0 / spacing)));
    std::vector<TorusPoint> out;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            TorusPoint x{(i + 0.5) / n, (j + 0.5) / n};
            for (const auto& t : targets) {
                // max-metric keeps the selection aligned with the product
                // structure of the target set: a cell is kept iff its
                // radius-box meets a target
                if (std::max(torus_d(x.q, t.q), torus_d(x.p, t.p)) <= radius) {
                    out.push_back(x);
                    break;
                }
            }
        }
    }
    return out;
}

struct SpanProjector {
    Eigen::MatrixXcd Pi, R;
    int rank = 0;
};

SpanProjector span_projector(int N, const std::vector<TorusPoint>& pts) {
    Eigen::MatrixXcd C(N, static_cast<int>(pts.size()));
    for (size_t i = 0; i < pts.size(); ++i)
        C.col(static_cast<int>(i)) = coherent_state(N, pts[i].q, pts[i].p);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeThinU);
    double smax = svd.singularValues()(0);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-6 * smax) ++r;
    SpanProjector sp;
    sp.R = svd.matrixU().leftCols(r);
    sp.Pi = sp.R * sp.R.adjoint();
    sp.rank = r;
    return sp;
}

}  // namespace

ProjectorPair coherent_projectors(const OpenMapBundle& bundle, double htilde,
                                  double h_neighbourhood) {
    if (htilde <= 0 || htilde > 1)
        throw std::invalid_argument("htilde must lie in (0, 1]");
    ProjectorPair pp;
    double lv = std::sqrt(1.0 / (bundle.N * htilde));
    // keep exactly the cells whose closure meets the trapped samples (half a
    // cell plus the sample resolution): fattening by a full spacing inflates
    // the covering-number exponent well above the box dimension at these N
    double res = 1.5 * std::pow(3.0, -std::min(bundle.cantor_depth, 7));
    auto pv = lattice_near(bundle.trapped_samples, lv, 0.5 * lv + res);
    auto sv = span_projector(bundle.N, pv);
    pp.Pi_V = sv.Pi;
    pp.R_V = sv.R;
    pp.rank_V = sv.rank;
    pp.lattice_V = static_cast<int>(pv.size());

    double lh = 1.0 / std::sqrt(static_cast<double>(bundle.N));
    auto ph = lattice_near(bundle.trapped_samples, lh, h_neighbourhood);
    auto sh = span_projector(bundle.N, ph);
    pp.Pi_h = sh.Pi;
    pp.rank_h = sh.rank;
    pp.lattice_h = static_cast<int>(ph.size());
    return pp;
}

Eigen::MatrixXcd anti_wick(int N, const std::function<double(double, double)>& g) {
    // oversample the coherent lattice 2x per axis: at critical density (N
    // states) the Gaussian frame degenerates and the quantization of 1 is far
    // from the identity
    int n = std::max(2, static_cast<int>(std::ceil(2.0 * std::sqrt(static_cast<double>(N)))));
    Eigen::MatrixXcd C(N, n * n);
    Eigen::VectorXd w(n * n);
    int col = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double q = (i + 0.5) / n, p = (j + 0.5) / n;
            C.col(col) = coherent_state(N, q, p);
            w(col) = g(q, p);
            ++col;
        }
    }
    double scale = static_cast<double>(N) / (n * n);
    Eigen::MatrixXcd G = scale * C * w.asDiagonal() * C.adjoint();
    return 0.5 * (G + G.adjoint());
}

Eigen::MatrixXcd weight_conjugate(const Eigen::MatrixXcd& M,
                                  const Eigen::MatrixXcd& G, double t) {
    if (t == 0.0) return M;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
    const auto& U = es.eigenvectors();
    Eigen::VectorXd lam = es.eigenvalues();
    if (t * (lam.maxCoeff() - lam.minCoeff()) > 500.0)
        throw std::runtime_error("weight conjugation exceeds the exponent budget");
    Eigen::VectorXcd ep(lam.size()), em(lam.size());
    for (int i = 0; i < lam.size(); ++i) {
        ep(i) = std::exp(t * lam(i));
        em(i) = std::exp(-t * lam(i));
    }
    Eigen::MatrixXcd Ep = U * ep.asDiagonal() * U.adjoint();
    Eigen::MatrixXcd Em = U * em.asDiagonal() * U.adjoint();
    return Em * M * Ep;
}

GrushinResult grushin(const Eigen::MatrixXcd& M, const Eigen::MatrixXcd& R) {
    const int r = static_cast<int>(R.cols());
    GrushinResult res;
    Eigen::MatrixXcd Pi = R * R.adjoint();
    Eigen::MatrixXcd Q =
        Eigen::MatrixXcd::Identity(M.rows(), M.rows()) - Pi;  // I - Pi
    res.offdiag_out = (Q * M).operatorNorm();
    res.offdiag_in = (M * Q).operatorNorm();
    double qnorm = (Q * M * Q).operatorNorm();
    if (qnorm >= 0.999) {
        res.converged = false;
        return res;
    }
    Eigen::MatrixXcd E =
        -(Eigen::MatrixXcd::Identity(r, r) - R.adjoint() * M * R);
    Eigen::MatrixXcd X = Q * M * R;  // [(I-Pi) M]^k R accumulator, k >= 1
    int k = 1;
    for (; k <= 500; ++k) {
        Eigen::MatrixXcd term = R.adjoint() * M * X;
        E += term;
        if (term.norm() < 1e-12) break;
        X = Q * M * X;
    }
    res.E_mp = std::move(E);
    res.series_terms_used = k;
    res.converged = true;
    return res;
}

Eigen::MatrixXcd grushin_direct(const Eigen::MatrixXcd& M,
                                const Eigen::MatrixXcd& R) {
    const int n = static_cast<int>(M.rows()), r = static_cast<int>(R.cols());
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(n + r, n + r);
    P.topLeftCorner(n, n) = Eigen::MatrixXcd::Identity(n, n) - M;
    P.topRightCorner(n, r) = R;
    P.bottomLeftCorner(r, n) = R.adjoint();
    Eigen::MatrixXcd inv = P.partialPivLu().inverse();
    return inv.bottomRightCorner(r, r);
}

std::vector<Eigen::MatrixXcd> grushin_series_terms(const Eigen::MatrixXcd& M,
                                                   const Eigen::MatrixXcd& R,
                                                   int max_terms) {
    Eigen::MatrixXcd Pi = R * R.adjoint();
    Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(M.rows(), M.rows()) - Pi;
    std::vector<Eigen::MatrixXcd> out;
    Eigen::MatrixXcd X = R;
    for (int k = 0; k < max_terms; ++k) {
        out.push_back(R.adjoint() * M * X);
        X = Q * M * X;
    }
    return out;
}

double jensen_count(const std::function<cplx(cplx)>& f, double R, cplx z_base) {
    double fb = std::abs(f(z_base));
    if (fb == 0) throw std::domain_error("jensen bound: base point is a zero");
    double prev = -1e300;
    int n = 64;
    double mx = 0;
    for (int iter = 0; iter < 8; ++iter) {
        mx = -1e300;
        for (int i = 0; i < n; ++i) {
            double th = 2.0 * M_PI * i / n;
            double v = std::abs(f(R * cplx(std::cos(th), std::sin(th))));
            mx = std::max(mx, std::log(v));
        }
        if (iter > 0 && std::abs(mx - prev) <= 1e-6 * std::max(1.0, std::abs(mx)))
            break;
        prev = mx;
        n *= 2;
    }
    return (mx - std::log(fb)) / std::log(1.5);
}

HqmoReport hqmo_checks(const OpenMapBundle& bundle, const ProjectorPair& proj) {
    const auto& T = bundle.trapped_samples;
    auto near_T = [&](double q, double p) {
        double best = 1e18;
        for (const auto& t : T) best = std::min(best, torus_dist({q, p}, t));
        return best;
    };
    Eigen::MatrixXcd Mt = proj.Pi_h * bundle.M * proj.Pi_h;
    Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(bundle.N, bundle.N);

    Eigen::MatrixXcd A1 = I;
    HqmoReport rep;
    rep.norm_identity = (Mt * (I - A1)).operatorNorm();

    // plateau wide enough to contain the truncation neighbourhood, so the
    // residual only sees Gaussian tails of the coherent states
    Eigen::MatrixXcd Ap = anti_wick(bundle.N, [&](double q, double p) {
        double d = near_T(q, p);
        double up = 1.0 - std::min(1.0, std::max(0.0, (d - 0.12) / 0.13));
        return up;
    });
    rep.norm_proper = (Mt * (I - Ap)).operatorNorm();

    Eigen::MatrixXcd Ac = anti_wick(bundle.N, [&](double q, double p) {
        (void)p;
        // supported inside the hole only
        double u = std::min(1.0, std::max(0.0, (q - 1.0 / 3) / 0.05)) *
                   std::min(1.0, std::max(0.0, (2.0 / 3 - q) / 0.05));
        return u;
    });
    rep.norm_complement = (Mt * (I - Ac)).operatorNorm();
    return rep;
}

double winding_number(const std::function<cplx(cplx)>& f, cplx z0, double radius,
                      int npts) {
    double total = 0;
    cplx prev = f(z0 + radius);
    for (int i = 1; i <= npts; ++i) {
        double th = 2.0 * M_PI * i / npts;
        cplx cur = f(z0 + radius * cplx(std::cos(th), std::sin(th)));
        total += std::arg(cur / prev);
        prev = cur;
    }
    return total / (2.0 * M_PI);
}

}  // namespace fwl
