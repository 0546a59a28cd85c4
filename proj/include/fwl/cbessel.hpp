#pragma once
#include <complex>
#include <vector>

namespace fwl {

using cplx = std::complex<double>;

/// J_0(z) .. J_nmax(z) for complex z, by backward (Miller) recurrence with
/// the even-order normalization sum. Valid for any moderate |Im z|.
std::vector<cplx> bessel_j_array(cplx z, int nmax);

struct BesselJY {
    std::vector<cplx> J, Y;  // orders 0..nmax
};

/// J and Y arrays together; Y_0 from the Neumann logarithmic series over the
/// J array, Y_1 = -Y_0', then upward recurrence (stable for Y).
BesselJY bessel_jy_array(cplx z, int nmax);

/// Single values, handling negative order via J_{-n} = (-1)^n J_n etc.
cplx bessel_j(int n, cplx z);
cplx bessel_y(int n, cplx z);
cplx hankel1(int n, cplx z);

}  // namespace fwl
