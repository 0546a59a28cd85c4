#include "fwl/boundary.hpp"

#include <cmath>
#include <stdexcept>

extern "C" void zgetrf_(const int* m, const int* n, std::complex<double>* a,
                        const int* lda, int* ipiv, int* info);

namespace fwl {

namespace {

cplx signed_order(const std::vector<cplx>& arr, int n) {
    int m = std::abs(n);
    cplx v = arr[m];
    if (n < 0 && (m % 2)) v = -v;
    return v;
}

// Dirichlet reflection ratios J_m / H_m on disc i; symmetric in the order sign.
std::vector<cplx> reflection_ratios(cplx ka, int m_max) {
    BesselJY jy = bessel_jy_array(ka, m_max);
    std::vector<cplx> r(m_max + 1);
    for (int m = 0; m <= m_max; ++m) {
        cplx h = jy.J[m] + cplx(0, 1) * jy.Y[m];
        r[m] = jy.J[m] / h;
    }
    return r;
}

// Outgoing-wave translation block from disc j to disc i:
// T[m', m] = H_{m-m'}(k R) exp(i (m-m') alpha), alpha the bearing of c_i seen
// from c_j. Combined with the reflection ratio of disc i and the overall sign.
void fill_block(Eigen::MatrixXcd& M, int row0, int col0, int m_max,
                const std::vector<cplx>& ratio_i, const std::vector<cplx>& h_trans,
                double alpha) {
    int B = 2 * m_max + 1;
    for (int mp = -m_max; mp <= m_max; ++mp) {
        for (int mm = -m_max; mm <= m_max; ++mm) {
            int q = mm - mp;
            cplx t = signed_order(h_trans, q) *
                     std::exp(cplx(0, 1) * static_cast<double>(q) * alpha);
            M(row0 + mp + m_max, col0 + mm + m_max) = -ratio_i[std::abs(mp)] * t;
        }
    }
    (void)B;
}

}  // namespace

int truncation_order(const DiscSystem& sys, cplx k) {
    double ka = std::abs(k) * sys.max_radius();
    return static_cast<int>(std::ceil(ka)) +
           std::max(8, static_cast<int>(std::ceil(3.0 * std::cbrt(ka))));
}

BoundaryOperator build_M(const DiscSystem& sys, cplx k, int m_max) {
    if (m_max < 0) m_max = truncation_order(sys, k);
    const int J = sys.count();
    const int B = 2 * m_max + 1;
    BoundaryOperator op;
    op.k = k;
    op.m_max = m_max;
    op.M = Eigen::MatrixXcd::Zero(J * B, J * B);

    std::vector<std::vector<cplx>> ratios(J);
    for (int i = 0; i < J; ++i)
        ratios[i] = reflection_ratios(k * sys.disc(i).radius, m_max);

    for (int i = 0; i < J; ++i) {
        for (int j = 0; j < J; ++j) {
            if (i == j) continue;
            Vec2 d = sys.disc(i).center - sys.disc(j).center;
            double R = norm(d);
            double alpha = std::atan2(d.y, d.x);
            BesselJY jy = bessel_jy_array(k * R, 2 * m_max);
            std::vector<cplx> h(2 * m_max + 1);
            for (int n = 0; n <= 2 * m_max; ++n)
                h[n] = jy.J[n] + cplx(0, 1) * jy.Y[n];
            fill_block(op.M, i * B, j * B, m_max, ratios[i], h, alpha);
        }
    }
    return op;
}

cplx log_det_I_minus(const Eigen::MatrixXcd& M) {
    const int n = static_cast<int>(M.rows());
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n) - M;
    std::vector<int> ipiv(n);
    int info = 0;
    zgetrf_(&n, &n, A.data(), &n, ipiv.data(), &info);
    if (info < 0) throw std::runtime_error("zgetrf: bad argument");
    cplx ld = 0;
    int swaps = 0;
    for (int i = 0; i < n; ++i) {
        ld += std::log(A(i, i));
        if (ipiv[i] != i + 1) ++swaps;
    }
    if (swaps % 2) ld += cplx(0, M_PI);
    return ld;
}

bool has_cyclic_symmetry(const DiscSystem& sys, double tol) {
    const int J = sys.count();
    if (J < 2) return false;
    Vec2 c{0, 0};
    for (const auto& d : sys.discs()) c += d.center;
    c = c / J;
    double phi = 2.0 * M_PI / J;
    double cs = std::cos(phi), sn = std::sin(phi);
    for (int j = 0; j < J; ++j) {
        const Disc& a = sys.disc(j);
        const Disc& b = sys.disc((j + 1) % J);
        Vec2 w = a.center - c;
        Vec2 r{cs * w.x - sn * w.y, sn * w.x + cs * w.y};
        if (norm(r + c - b.center) > tol) return false;
        if (std::abs(a.radius - b.radius) > tol) return false;
    }
    return true;
}

std::vector<Eigen::MatrixXcd> cyclic_sector_blocks(const DiscSystem& sys, cplx k,
                                                   int m_max) {
    if (!has_cyclic_symmetry(sys))
        throw std::runtime_error("system lacks cyclic symmetry");
    if (m_max < 0) m_max = truncation_order(sys, k);
    const int J = sys.count();
    const int B = 2 * m_max + 1;
    double phi = 2.0 * M_PI / J;

    auto ratio0 = reflection_ratios(k * sys.disc(0).radius, m_max);
    // blocks M_{0j} for j != 0
    std::vector<Eigen::MatrixXcd> M0j(J);
    for (int j = 1; j < J; ++j) {
        Vec2 d = sys.disc(0).center - sys.disc(j).center;
        double R = norm(d);
        double alpha = std::atan2(d.y, d.x);
        BesselJY jy = bessel_jy_array(k * R, 2 * m_max);
        std::vector<cplx> h(2 * m_max + 1);
        for (int n = 0; n <= 2 * m_max; ++n)
            h[n] = jy.J[n] + cplx(0, 1) * jy.Y[n];
        M0j[j] = Eigen::MatrixXcd::Zero(B, B);
        fill_block(M0j[j], 0, 0, m_max, ratio0, h, alpha);
    }

    std::vector<Eigen::MatrixXcd> sectors(J);
    for (int l = 0; l < J; ++l) {
        Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(B, B);
        for (int j = 1; j < J; ++j) {
            cplx wjl = std::exp(cplx(0, 1) * (2.0 * M_PI * l * j / J));
            for (int mm = -m_max; mm <= m_max; ++mm) {
                cplx col_phase =
                    wjl * std::exp(cplx(0, -1) * (j * mm * phi));
                S.col(mm + m_max) += col_phase * M0j[j].col(mm + m_max);
            }
        }
        sectors[l] = std::move(S);
    }
    return sectors;
}

cplx log_det_I_minus_cyclic(const DiscSystem& sys, cplx k, int m_max) {
    auto sectors = cyclic_sector_blocks(sys, k, m_max);
    cplx ld = 0;
    for (const auto& S : sectors) ld += log_det_I_minus(S);
    return ld;
}

}  // namespace fwl
