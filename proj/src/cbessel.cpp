#include "fwl/cbessel.hpp"

#include <cmath>
#include <stdexcept>

namespace fwl {

namespace {
constexpr double kEulerGamma = 0.57721566490153286060651209;

int start_order(double az, int nmax) {
    // safely above both the argument turning point and the requested order
    int m = static_cast<int>(az + 12.0 + 8.0 * std::cbrt(az + 1.0));
    m = std::max(m, nmax + 14);
    if (m % 2) ++m;  // even start keeps the normalization sum aligned
    return m;
}
}  // namespace

std::vector<cplx> bessel_j_array(cplx z, int nmax) {
    if (nmax < 1) nmax = 1;
    std::vector<cplx> J(nmax + 1);
    if (std::abs(z) == 0.0) {
        J[0] = 1.0;
        return J;
    }
    double az = std::abs(z);
    int m = start_order(az, nmax);
    cplx fp = 0.0, f = 1e-280;
    cplx norm = 0.0;
    cplx two_over_z = 2.0 / z;
    for (int n = m; n >= 1; --n) {
        cplx fm = static_cast<double>(n) * two_over_z * f - fp;
        fp = f;
        f = fm;
        if (n - 1 <= nmax) J[n - 1] = f;
        if (((n - 1) % 2) == 0 && n - 1 > 0) norm += 2.0 * f;
        double sc = std::max(std::abs(f.real()), std::abs(f.imag()));
        if (sc > 1e250) {
            double inv = 1e-250;
            fp *= inv;
            f *= inv;
            norm *= inv;
            for (auto& v : J) v *= inv;
        }
    }
    norm += f;  // J_0 contribution
    for (auto& v : J) v /= norm;
    return J;
}

BesselJY bessel_jy_array(cplx z, int nmax) {
    if (std::abs(z) == 0.0)
        throw std::domain_error("bessel Y undefined at z = 0");
    if (nmax < 2) nmax = 2;
    double az = std::abs(z);
    // the Neumann series for Y0 needs J orders well past |z|
    int jmax = std::max(nmax + 2,
                        static_cast<int>(az + 10.0 + 6.0 * std::cbrt(az + 1.0)));
    if (jmax % 2) ++jmax;
    std::vector<cplx> J = bessel_j_array(z, jmax);

    cplx lg = std::log(z / 2.0) + kEulerGamma;
    cplx s0 = 0.0, s0p = 0.0;
    for (int k = 1; 2 * k + 1 <= jmax; ++k) {
        double sgn = (k % 2) ? -1.0 : 1.0;
        s0 += sgn * J[2 * k] / static_cast<double>(k);
        // derivative of J_{2k}
        cplx dJ = 0.5 * (J[2 * k - 1] - J[2 * k + 1]);
        s0p += sgn * dJ / static_cast<double>(k);
    }
    cplx Y0 = (2.0 / M_PI) * (lg * J[0] - 2.0 * s0);
    // Y0' = (2/pi) * (J0/z + lg * J0' - 2 s0'), J0' = -J1; Y1 = -Y0'
    cplx Y0p = (2.0 / M_PI) * (J[0] / z - lg * J[1] - 2.0 * s0p);
    cplx Y1 = -Y0p;

    BesselJY out;
    out.J.assign(J.begin(), J.begin() + nmax + 1);
    out.Y.resize(nmax + 1);
    out.Y[0] = Y0;
    out.Y[1] = Y1;
    cplx two_over_z = 2.0 / z;
    for (int n = 1; n < nmax; ++n)
        out.Y[n + 1] = static_cast<double>(n) * two_over_z * out.Y[n] - out.Y[n - 1];
    return out;
}

cplx bessel_j(int n, cplx z) {
    int m = std::abs(n);
    auto J = bessel_j_array(z, m);
    cplx v = J[m];
    if (n < 0 && (m % 2)) v = -v;
    return v;
}

cplx bessel_y(int n, cplx z) {
    int m = std::abs(n);
    auto jy = bessel_jy_array(z, m);
    cplx v = jy.Y[m];
    if (n < 0 && (m % 2)) v = -v;
    return v;
}

cplx hankel1(int n, cplx z) {
    int m = std::abs(n);
    auto jy = bessel_jy_array(z, m);
    cplx v = jy.J[m] + cplx(0, 1) * jy.Y[m];
    if (n < 0 && (m % 2)) v = -v;
    return v;
}

}  // namespace fwl
