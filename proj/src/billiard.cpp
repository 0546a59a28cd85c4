#include "fwl/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <unordered_set>
#include <stdexcept>

namespace fwl {

namespace {
constexpr double kTangentTol = 1e-12;

double wrap_2pi(double s) {
    s = std::fmod(s, 2.0 * M_PI);
    if (s < 0) s += 2.0 * M_PI;
    return s;
}

// First-intersection search shared by step / step_shadow: returns the disc
// index hit and both quadratic roots, or nullopt if the ray escapes.
struct Hit {
    int disc;
    double t_near;
    double t_far;
};

std::optional<Hit> first_hit(const DiscSystem& sys, const Ray& r, int from_disc) {
    std::optional<Hit> best;
    for (int i = 0; i < sys.count(); ++i) {
        if (i == from_disc) continue;
        Vec2 w = r.x - sys.disc(i).center;
        double b = dot(r.xi, w);
        double c = norm2(w) - sys.disc(i).radius * sys.disc(i).radius;
        double D = b * b - c;
        if (D < 0.0) continue;
        double sq = std::sqrt(D);
        double t1 = -b - sq, t2 = -b + sq;
        if (t1 <= kTangentTol) continue;
        if (!best || t1 < best->t_near) best = Hit{i, t1, t2};
    }
    return best;
}
}  // namespace

Ray lift(const DiscSystem& sys, const PhasePoint& rho) {
    if (std::abs(rho.p) > 1.0)
        throw std::domain_error("phase point has |p| > 1");
    const Disc& d = sys.disc(rho.disc);
    Vec2 nu{std::cos(rho.s), std::sin(rho.s)};
    Vec2 tau{-std::sin(rho.s), std::cos(rho.s)};
    double q = std::sqrt(std::max(0.0, 1.0 - rho.p * rho.p));
    Ray r;
    r.x = d.center + d.radius * nu;
    r.nu = nu;
    r.tau = tau;
    r.xi = rho.p * tau + q * nu;
    return r;
}

PhasePoint project(const DiscSystem& sys, int disc, const Vec2& hit, const Vec2& xi) {
    Vec2 w = hit - sys.disc(disc).center;
    double s = wrap_2pi(std::atan2(w.y, w.x));
    Vec2 tau{-std::sin(s), std::cos(s)};
    return {disc, s, dot(tau, xi)};
}

StepResult step(const DiscSystem& sys, const PhasePoint& rho) {
    Ray r = lift(sys, rho);
    auto hit = first_hit(sys, r, rho.disc);
    if (!hit) return {std::nullopt, 0.0, StepKind::Escaped};
    Vec2 y = r.x + hit->t_near * r.xi;
    return {project(sys, hit->disc, y, r.xi), hit->t_near, StepKind::Forward};
}

StepResult step_shadow(const DiscSystem& sys, const PhasePoint& rho) {
    Ray r = lift(sys, rho);
    auto hit = first_hit(sys, r, rho.disc);
    if (!hit) return {std::nullopt, 0.0, StepKind::Escaped};
    Vec2 y = r.x + hit->t_far * r.xi;
    return {project(sys, hit->disc, y, r.xi), hit->t_far, StepKind::Shadow};
}

PhasePoint involution(const PhasePoint& rho) { return {rho.disc, rho.s, -rho.p}; }

StepResult step_back(const DiscSystem& sys, const PhasePoint& rho) {
    StepResult fwd = step(sys, involution(rho));
    if (fwd.kind == StepKind::Escaped) return fwd;
    fwd.next = involution(*fwd.next);
    return fwd;
}

Mat2 jacobian(const DiscSystem& sys, const PhasePoint& rho) {
    Ray r = lift(sys, rho);
    auto hit = first_hit(sys, r, rho.disc);
    if (!hit) throw std::runtime_error("jacobian: orbit escapes at this point");

    const Disc& dj = sys.disc(rho.disc);
    const Disc& di = sys.disc(hit->disc);
    double t = hit->t_near;
    double p = rho.p;
    double q = std::sqrt(std::max(0.0, 1.0 - p * p));
    if (q < 1e-14)
        throw std::domain_error("jacobian undefined at glancing |p| = 1");

    Vec2 y = r.x + t * r.xi;
    Vec2 ni = (y - di.center) / di.radius;
    Vec2 ti{-ni.y, ni.x};
    double nxi = dot(ni, r.xi);  // < 0 on the illuminated side

    // Variations of the lifted ray with respect to (s, p).
    Vec2 dx_ds = dj.radius * r.tau;
    Vec2 dxi_ds = (-p) * r.nu + q * r.tau;
    Vec2 dxi_dp = r.tau - (p / q) * r.nu;

    Mat2 J{};
    for (int col = 0; col < 2; ++col) {
        Vec2 dx = (col == 0) ? dx_ds : Vec2{0, 0};
        Vec2 dxi = (col == 0) ? dxi_ds : dxi_dp;
        double dt = -dot(ni, dx + t * dxi) / nxi;
        Vec2 dy = dx + t * dxi + dt * r.xi;
        double ds2 = dot(ti, dy) / di.radius;
        double dp2 = dot(ti, dxi) - nxi * ds2;
        J[0][col] = ds2;
        J[1][col] = dp2;
    }
    return J;
}

Mat2 jacobian_fd(const DiscSystem& sys, const PhasePoint& rho, double h) {
    auto eval = [&](double s, double p) {
        StepResult sr = step(sys, {rho.disc, s, p});
        if (sr.kind == StepKind::Escaped)
            throw std::runtime_error("jacobian_fd: orbit escapes near this point");
        return *sr.next;
    };
    PhasePoint pss = eval(rho.s + h, rho.p), mss = eval(rho.s - h, rho.p);
    PhasePoint psp = eval(rho.s, rho.p + h), msp = eval(rho.s, rho.p - h);
    auto dwrap = [](double a, double b) {
        double d = a - b;
        while (d > M_PI) d -= 2.0 * M_PI;
        while (d < -M_PI) d += 2.0 * M_PI;
        return d;
    };
    Mat2 J{};
    J[0][0] = dwrap(pss.s, mss.s) / (2 * h);
    J[1][0] = (pss.p - mss.p) / (2 * h);
    J[0][1] = dwrap(psp.s, msp.s) / (2 * h);
    J[1][1] = (psp.p - msp.p) / (2 * h);
    return J;
}

namespace {
bool survives(const DiscSystem& sys, PhasePoint rho, int depth, bool forward) {
    for (int k = 0; k < depth; ++k) {
        StepResult sr = forward ? step(sys, rho) : step_back(sys, rho);
        if (sr.kind == StepKind::Escaped) return false;
        rho = *sr.next;
    }
    return true;
}
}  // namespace

TrappedSample trapped_sample(const DiscSystem& sys, int depth, int ns, int np) {
    TrappedSample out;
    out.depth = depth;
    out.ns = ns;
    out.np = np;

    auto trapped = [&](const PhasePoint& rho, int d) {
        return survives(sys, rho, d, true) && survives(sys, rho, d, false);
    };

    // survivor cells on a coarse base grid, then two 3x3 refinement passes
    // around survivors and their neighbours. The survival depth is graded
    // with the cell size (full depth only at the final level) so that thin
    // deep-survivor strips are not lost between coarse cell centers.
    const int kRefine = 2;
    struct Cell {
        int disc, is, ip;
    };
    std::vector<Cell> cells;
    for (int j = 0; j < sys.count(); ++j)
        for (int is = 0; is < ns; ++is)
            for (int ip = 0; ip < np; ++ip) {
                PhasePoint rho{j, (is + 0.5) * 2.0 * M_PI / ns,
                               -1.0 + (ip + 0.5) * 2.0 / np};
                if (trapped(rho, std::max(1, depth - kRefine)))
                    cells.push_back({j, is, ip});
            }

    // subdivision factor per level: one extra survival step shrinks the
    // strips by the per-bounce expansion rate, so match it (estimated from
    // the tangent map at surviving points)
    int factor = 3;
    {
        double acc = 0;
        int cnt = 0;
        for (size_t i = 0; i < cells.size() && cnt < 64; i += 1 + cells.size() / 64) {
            PhasePoint rho{cells[i].disc, (cells[i].is + 0.5) * 2.0 * M_PI / ns,
                           -1.0 + (cells[i].ip + 0.5) * 2.0 / np};
            Mat2 J = jacobian(sys, rho);
            double n1 = std::abs(J[0][0]) + std::abs(J[0][1]);
            double n2 = std::abs(J[1][0]) + std::abs(J[1][1]);
            acc += std::log(std::max(n1, n2));
            ++cnt;
        }
        if (cnt > 0)
            factor = std::clamp(static_cast<int>(std::lround(std::exp(acc / cnt))),
                                3, 12);
    }

    long cns = ns, cnp = np;
    for (int level = 0; level < kRefine; ++level) {
        const int d_level = std::max(1, depth - kRefine + 1 + level);
        std::vector<Cell> next;
        std::vector<std::unordered_set<uint64_t>> seen(sys.count());
        auto key = [&](const Cell& c) {
            return (static_cast<uint64_t>(c.is) << 32) |
                   static_cast<uint32_t>(c.ip);
        };
        long fns = cns * factor, fnp = cnp * factor;
        for (const Cell& c : cells) {
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    long bis = c.is + di, bip = c.ip + dj;
                    bis = (bis % cns + cns) % cns;
                    if (bip < 0 || bip >= cnp) continue;
                    for (int si = 0; si < factor; ++si)
                        for (int sj = 0; sj < factor; ++sj) {
                            Cell f{c.disc, static_cast<int>(factor * bis + si),
                                   static_cast<int>(factor * bip + sj)};
                            if (!seen[c.disc].insert(key(f)).second) continue;
                            PhasePoint rho{c.disc,
                                           (f.is + 0.5) * 2.0 * M_PI / fns,
                                           -1.0 + (f.ip + 0.5) * 2.0 / fnp};
                            if (trapped(rho, d_level)) next.push_back(f);
                        }
                }
        }
        cells = std::move(next);
        cns = fns;
        cnp = fnp;
    }

    for (const Cell& c : cells)
        out.points.push_back({c.disc, (c.is + 0.5) * 2.0 * M_PI / cns,
                              -1.0 + (c.ip + 0.5) * 2.0 / cnp});
    return out;
}

TrappedSample tail_sample(const DiscSystem& sys, int depth, int ns, int np,
                          bool forward) {
    TrappedSample out;
    out.depth = depth;
    out.ns = ns;
    out.np = np;
    for (int j = 0; j < sys.count(); ++j) {
        for (int is = 0; is < ns; ++is) {
            double s = (is + 0.5) * 2.0 * M_PI / ns;
            for (int ip = 0; ip < np; ++ip) {
                double p = -1.0 + (ip + 0.5) * 2.0 / np;
                PhasePoint rho{j, s, p};
                if (survives(sys, rho, depth, forward)) out.points.push_back(rho);
            }
        }
    }
    return out;
}

bool PhaseBox::contains(const PhasePoint& rho) const {
    if (rho.disc != disc || rho.p < p_lo || rho.p > p_hi) return false;
    // the s interval may extend past 2*pi when it straddles the chart seam
    for (double s : {rho.s, rho.s + 2.0 * M_PI, rho.s - 2.0 * M_PI})
        if (s >= s_lo && s <= s_hi) return true;
    return false;
}

bool PhaseRegion::contains(const PhasePoint& rho) const {
    for (const auto& b : boxes)
        if (b.contains(rho)) return true;
    return false;
}

int escape_time(const DiscSystem& sys, const PhasePoint& rho,
                const PhaseRegion& region, int cap) {
    PhasePoint cur = rho;
    for (int k = 1; k <= cap; ++k) {
        StepResult sr = step(sys, cur);
        if (sr.kind == StepKind::Escaped) return k;
        cur = *sr.next;
        if (!region.contains(cur)) return k;
    }
    return cap + 1;  // trapped sentinel
}

void write_sample_csv(const TrappedSample& sample, const std::string& path) {
    std::ofstream f(path);
    f << "disc,s,p,depth\n";
    char buf[128];
    for (const auto& rho : sample.points) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d\n", rho.disc, rho.s, rho.p,
                      sample.depth);
        f << buf;
    }
}

void write_sample_grid(const DiscSystem& sys, const TrappedSample& sample,
                       const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    const char magic[8] = {'F', 'W', 'L', 'G', 'R', 'I', 'D', '1'};
    f.write(magic, 8);
    int32_t hdr[4] = {sys.count(), sample.ns, sample.np, sample.depth};
    f.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    std::vector<double> grid(static_cast<size_t>(sys.count()) * sample.ns * sample.np,
                             0.0);
    double ds = 2.0 * M_PI / sample.ns, dp = 2.0 / sample.np;
    for (const auto& rho : sample.points) {
        int is = std::min(sample.ns - 1, static_cast<int>(rho.s / ds));
        int ip = std::min(sample.np - 1, static_cast<int>((rho.p + 1.0) / dp));
        grid[(static_cast<size_t>(rho.disc) * sample.ns + is) * sample.np + ip] = 1.0;
    }
    f.write(reinterpret_cast<const char*>(grid.data()),
            static_cast<std::streamsize>(grid.size() * sizeof(double)));
}

}  // namespace fwl
