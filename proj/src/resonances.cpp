#include "fwl/resonances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace fwl {

cplx log_det_at(const DiscSystem& sys, cplx k, const ResonanceOptions& opt) {
    if (opt.use_symmetry) return log_det_I_minus_cyclic(sys, k, opt.m_max);
    return log_det_I_minus(build_M(sys, k, opt.m_max).M);
}

namespace {

cplx dlogdet(const DiscSystem& sys, cplx k, const ResonanceOptions& opt, double h) {
    cplx lp = log_det_at(sys, k + h, opt);
    cplx lm = log_det_at(sys, k - h, opt);
    // the imaginary parts are only defined mod 2*pi; wrap the difference
    cplx d = lp - lm;
    double im = std::remainder(d.imag(), 2.0 * M_PI);
    return cplx(d.real(), im) / (2.0 * h);
}

bool is_spurious(const DiscSystem& sys, cplx k, int m_max, double tol) {
    for (const auto& d : sys.discs()) {
        BesselJY jy = bessel_jy_array(k * d.radius, m_max);
        for (int m = 0; m <= m_max; ++m) {
            cplx h = jy.J[m] + cplx(0, 1) * jy.Y[m];
            if (std::abs(h) < tol) return true;
        }
    }
    return false;
}

}  // namespace

std::vector<Resonance> find_resonances(const DiscSystem& sys, double re_min,
                                       double re_max, double im_min, double im_max,
                                       const ResonanceOptions& opt) {
    std::vector<Resonance> out;
    if (sys.count() < 2) return out;  // det(I - M) = 1 identically

    int nre = opt.grid_re > 0
                  ? opt.grid_re
                  : std::max(8, static_cast<int>((re_max - re_min) / 0.12));
    int nim = std::max(4, opt.grid_im);
    double dre = (re_max - re_min) / nre, dim = (im_max - im_min) / nim;

    std::vector<std::vector<double>> ld(nre + 1, std::vector<double>(nim + 1));
    for (int i = 0; i <= nre; ++i)
        for (int j = 0; j <= nim; ++j)
            ld[i][j] =
                log_det_at(sys, {re_min + i * dre, im_min + j * dim}, opt).real();

    auto newton = [&](cplx k0) -> std::optional<Resonance> {
        cplx k = k0;
        double h = std::max(1e-6, 0.02 * std::min(dre, dim));
        double last = 1e18, best = 1e18;
        int stalled = 0;
        for (int it = 0; it < opt.newton_max_iter; ++it) {
            cplx der = dlogdet(sys, k, opt, h);
            if (std::abs(der) < 1e-14) return std::nullopt;
            cplx dk = 1.0 / der;
            k -= dk;
            last = std::abs(dk);
            if (k.real() < re_min - dre || k.real() > re_max + dre ||
                k.imag() < im_min - dim || k.imag() > im_max + dim)
                return std::nullopt;
            double tol = opt.newton_tol * std::max(1.0, std::abs(k));
            if (last < tol) return Resonance{k, 1, last};
            // accept on stagnation at the finite-difference noise floor
            if (last < 0.9 * best) {
                best = last;
                stalled = 0;
            } else if (++stalled >= 4 && best < 1e3 * tol) {
                return Resonance{k, 1, last};
            }
            h = std::min(h, std::max(1e-7, 0.1 * last));
        }
        return std::nullopt;
    };

    for (int i = 1; i < nre; ++i) {
        for (int j = 1; j < nim; ++j) {
            double v = ld[i][j];
            bool minimum = true;
            for (int di = -1; di <= 1 && minimum; ++di)
                for (int dj = -1; dj <= 1; ++dj)
                    if ((di || dj) && ld[i + di][j + dj] < v) {
                        minimum = false;
                        break;
                    }
            if (!minimum) continue;
            auto r = newton({re_min + i * dre, im_min + j * dim});
            if (!r) continue;
            if (r->k.real() < re_min || r->k.real() > re_max ||
                r->k.imag() < im_min || r->k.imag() > im_max)
                continue;
            int mm = opt.m_max >= 0 ? opt.m_max : truncation_order(sys, r->k);
            if (is_spurious(sys, r->k, mm, opt.spurious_tol)) continue;
            bool dup = false;
            for (const auto& e : out)
                if (std::abs(e.k - r->k) <
                    opt.dedupe_tol * std::max(1.0, std::abs(r->k))) {
                    dup = true;
                    break;
                }
            if (!dup) out.push_back(*r);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Resonance& a, const Resonance& b) {
                  return a.k.real() < b.k.real();
              });
    if (opt.with_multiplicities) {
        for (auto& r : out) {
            double nn = 1e18;
            for (const auto& e : out)
                if (&e != &r) nn = std::min(nn, std::abs(e.k - r.k));
            double rad = std::min(0.04, 0.3 * nn);
            r.multiplicity = multiplicity_contour(sys, r.k, rad, opt);
        }
    }
    return out;
}

int multiplicity_contour(const DiscSystem& sys, cplx k0, double radius,
                         const ResonanceOptions& opt, int npts) {
    double total = 0;
    cplx prev = log_det_at(sys, k0 + radius, opt);
    double min_re = prev.real();
    for (int i = 1; i <= npts; ++i) {
        double th = 2.0 * M_PI * i / npts;
        cplx k = k0 + radius * cplx(std::cos(th), std::sin(th));
        cplx cur = log_det_at(sys, k, opt);
        min_re = std::min(min_re, cur.real());
        total += std::remainder((cur - prev).imag(), 2.0 * M_PI);
        prev = cur;
    }
    double w = total / (2.0 * M_PI);
    double rounded = std::round(w);
    if (std::abs(w - rounded) > 0.05)
        throw std::runtime_error("winding number failed to round to an integer");
    return static_cast<int>(rounded);
}

WeylFit weyl_fit(const std::vector<Resonance>& res, double alpha,
                 const std::vector<double>& r_values) {
    WeylFit fit;
    fit.alpha = alpha;
    for (double r : r_values) {
        double n = 0;
        for (const auto& e : res)
            if (e.k.imag() > -alpha && std::abs(e.k) <= r) n += e.multiplicity;
        fit.r.push_back(r);
        fit.N.push_back(n);
    }
    // unit windows [r, r+1)
    for (double r : r_values) {
        double n = 0;
        for (const auto& e : res)
            if (e.k.imag() > -alpha && std::abs(e.k) >= r && std::abs(e.k) < r + 1.0)
                n += e.multiplicity;
        fit.window_r.push_back(r);
        fit.window_counts.push_back(n);
    }
    auto slope_of = [](const std::vector<double>& xs, const std::vector<double>& ys,
                       double* intercept) -> std::optional<double> {
        std::vector<double> lx, ly;
        for (size_t i = 0; i < xs.size(); ++i)
            if (ys[i] > 0) {
                lx.push_back(std::log(xs[i]));
                ly.push_back(std::log(ys[i]));
            }
        if (lx.size() < 3) return std::nullopt;
        double mx = 0, my = 0;
        for (size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
        mx /= lx.size();
        my /= lx.size();
        double sxx = 0, sxy = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        if (sxx == 0) return std::nullopt;
        if (intercept) *intercept = my - (sxy / sxx) * mx;
        return sxy / sxx;
    };
    double icpt = 0;
    if (auto s = slope_of(fit.r, fit.N, &icpt)) {
        fit.slope = *s;
        fit.prefactor = std::exp(icpt);
        fit.fitted = true;
    }
    if (auto s = slope_of(fit.window_r, fit.window_counts, nullptr))
        fit.window_slope = *s;
    return fit;
}

cplx k_to_z(cplx k, double h) {
    return cplx(0, 1) / h * (h * h * k * k - 1.0);
}

void write_resonances_csv(const std::vector<Resonance>& res,
                          const std::string& path) {
    std::ofstream f(path);
    f << "re_k,im_k,multiplicity,residual\n";
    char buf[160];
    for (const auto& r : res) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.3g\n", r.k.real(),
                      r.k.imag(), r.multiplicity, r.newton_residual);
        f << buf;
    }
}

std::vector<Resonance> read_resonances_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::vector<Resonance> out;
    std::string line;
    std::getline(f, line);  // header
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream is(line);
        double re, im, resid;
        int mult;
        if (is >> re >> im >> mult >> resid)
            out.push_back({{re, im}, mult, resid});
    }
    return out;
}

}  // namespace fwl
