#include "fwl/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace fwl {

namespace {

struct LineFit {
    double slope = 0, intercept = 0, r2 = 1, stderr_slope = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) sx += x[i], sy += y[i];
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (size_t i = 0; i < n; ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    if (n > 2) f.stderr_slope = std::sqrt(ss_res / (n - 2) / sxx);
    return f;
}

// Truncated Euler-product expansion: coefficients of
// prod_p (1 - t_p z^{n_p}) up to z^max_period, evaluated at z = 1.
double cycle_expansion(const std::vector<PeriodicOrbit>& orbits, int max_period,
                       const std::vector<double>& weights) {
    std::vector<double> poly(max_period + 1, 0.0);
    poly[0] = 1.0;
    for (size_t i = 0; i < orbits.size(); ++i) {
        int np = static_cast<int>(orbits[i].word.size());
        if (np > max_period) continue;
        for (int d = max_period; d >= np; --d) poly[d] -= weights[i] * poly[d - np];
    }
    double sum = 0;
    for (double c : poly) sum += c;
    return sum;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if (flo * fhi > 0)
        throw std::runtime_error("pressure root bracketing failed");
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        double mid = 0.5 * (lo + hi), fm = f(mid);
        if (fm == 0) return mid;
        if (flo * fm < 0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

DimensionEstimate box_dimension(const TrappedSample& sample,
                                const std::vector<double>& scales) {
    if (scales.size() < 4)
        throw std::invalid_argument("box_dimension needs at least 4 scales");
    auto [mn, mx] = std::minmax_element(scales.begin(), scales.end());
    if (*mx / *mn < std::pow(10.0, 1.5))
        throw std::invalid_argument("box_dimension scales must span 1.5 decades");

    DimensionEstimate est;
    est.method = DimensionEstimate::Method::BoxCount;
    est.scales = scales;
    std::vector<double> lx, ly;
    for (double eps : scales) {
        std::unordered_set<uint64_t> boxes;
        for (const auto& rho : sample.points) {
            uint64_t is = static_cast<uint64_t>(rho.s / eps);
            uint64_t ip = static_cast<uint64_t>((rho.p + 1.0) / eps);
            boxes.insert((static_cast<uint64_t>(rho.disc) << 52) | (is << 26) | ip);
        }
        double n = std::max<double>(1, boxes.size());
        est.counts.push_back(n);
        lx.push_back(std::log(1.0 / eps));
        ly.push_back(std::log(n));
    }
    LineFit f = fit_line(lx, ly);
    est.dim = f.slope;
    est.mu = f.slope / 2.0;
    est.r2 = f.r2;
    est.slope_stderr = f.stderr_slope;
    for (size_t i = 0; i + 1 < lx.size(); ++i) {
        double local = (ly[i + 1] - ly[i]) / (lx[i + 1] - lx[i]);
        if (std::abs(local - f.slope) > 0.25) est.pure_dim = false;
    }
    return est;
}

DimensionEstimate pressure_dimension(const std::vector<PeriodicOrbit>& orbits,
                                     int max_period) {
    if (orbits.empty())
        throw std::invalid_argument("pressure_dimension needs a nonempty orbit list");
    auto F = [&](double s) {
        std::vector<double> w(orbits.size());
        for (size_t i = 0; i < orbits.size(); ++i)
            w[i] = std::pow(orbits[i].lambda, -s);
        return cycle_expansion(orbits, max_period, w);
    };
    double s_star = bisect(F, -0.5, 2.0);
    DimensionEstimate est;
    est.method = DimensionEstimate::Method::Pressure;
    est.mu = s_star;
    est.dim = 2.0 * s_star;
    est.scales = {static_cast<double>(max_period)};
    est.counts = {std::abs(F(s_star))};
    return est;
}

EscapeRate escape_rate(const std::vector<PeriodicOrbit>& orbits, int max_period) {
    if (orbits.empty())
        throw std::invalid_argument("escape_rate needs a nonempty orbit list");
    auto solve = [&](bool per_length) {
        auto F = [&](double g) {
            std::vector<double> w(orbits.size());
            for (size_t i = 0; i < orbits.size(); ++i) {
                double expo = per_length ? orbits[i].length
                                         : static_cast<double>(orbits[i].word.size());
                w[i] = std::exp(g * expo) / orbits[i].lambda;
            }
            return cycle_expansion(orbits, max_period, w);
        };
        // the truncated expansion turns positive again well past the root, so
        // bracket the first sign change with a fine forward scan
        double lo = 0.0, hi = 0.0;
        const double step = 0.01;
        while (hi < 20.0) {
            hi += step;
            if (F(hi) <= 0) break;
            lo = hi;
        }
        if (F(hi) > 0) throw std::runtime_error("escape rate bracketing failed");
        return bisect(F, lo, hi);
    };
    EscapeRate r;
    r.gamma0_per_length = solve(true);
    r.gamma0_per_bounce = solve(false);
    return r;
}

std::string dimension_report_json(const DimensionEstimate& est, const EscapeRate* rate) {
    nlohmann::json j;
    j["method"] =
        est.method == DimensionEstimate::Method::BoxCount ? "box_count" : "pressure";
    j["dim"] = est.dim;
    j["mu"] = est.mu;
    j["diagnostics"] = {{"scales", est.scales},
                        {"counts", est.counts},
                        {"r2", est.r2},
                        {"slope_stderr", est.slope_stderr},
                        {"pure_dim", est.pure_dim}};
    if (rate) {
        j["gamma0"] = rate->gamma0_per_length;
        j["gamma0_per_bounce"] = rate->gamma0_per_bounce;
    }
    return j.dump(2);
}

}  // namespace fwl
