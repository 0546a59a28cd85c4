#include "fwl/escape.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace fwl {

double smoothstep(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    return t * t * t * (10 + t * (-15 + 6 * t));
}

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double sdiff(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d > M_PI) d -= kTwoPi;
    if (d < -M_PI) d += kTwoPi;
    return d;
}

double pdist(const PhasePoint& a, const PhasePoint& b) {
    double ds = sdiff(a.s, b.s), dp = a.p - b.p;
    return std::sqrt(ds * ds + dp * dp);
}

// Per-disc bucket grid over phase points, periodic in s.
struct Idx {
    double cell = 0;
    int ncs = 0;  // cells along s (exact tiling of [0, 2pi))
    std::vector<PhasePoint> pts;
    std::unordered_map<uint64_t, std::vector<int32_t>> map;

    static uint64_t key(int disc, int is, int ip) {
        return (static_cast<uint64_t>(disc) << 44) |
               (static_cast<uint64_t>(static_cast<uint32_t>(is)) << 22) |
               static_cast<uint32_t>(ip + (1 << 20));
    }

    void build(std::vector<PhasePoint> p, double cell_size) {
        pts = std::move(p);
        ncs = std::max(1, static_cast<int>(std::ceil(kTwoPi / cell_size)));
        cell = kTwoPi / ncs;
        map.clear();
        for (size_t i = 0; i < pts.size(); ++i) {
            int is = static_cast<int>(pts[i].s / cell) % ncs;
            int ip = static_cast<int>(std::floor(pts[i].p / cell));
            map[key(pts[i].disc, is, ip)].push_back(static_cast<int32_t>(i));
        }
    }

    template <class F>
    void visit_cell(int disc, int is, int ip, F&& f) const {
        is = ((is % ncs) + ncs) % ncs;
        auto it = map.find(key(disc, is, ip));
        if (it == map.end()) return;
        for (int32_t i : it->second) f(pts[i], i);
    }

    /// visit all points within Chebyshev ring `r` of cells around x
    template <class F>
    void visit_ring(const PhasePoint& x, int r, F&& f) const {
        int is0 = static_cast<int>(std::floor(x.s / cell));
        int ip0 = static_cast<int>(std::floor(x.p / cell));
        if (r == 0) {
            visit_cell(x.disc, is0, ip0, f);
            return;
        }
        for (int di = -r; di <= r; ++di) {
            visit_cell(x.disc, is0 + di, ip0 - r, f);
            visit_cell(x.disc, is0 + di, ip0 + r, f);
        }
        for (int dp = -r + 1; dp <= r - 1; ++dp) {
            visit_cell(x.disc, is0 - r, ip0 + dp, f);
            visit_cell(x.disc, is0 + r, ip0 + dp, f);
        }
    }

    /// Nearest-point distance, giving up once the lower bound exceeds cap.
    double nearest(const PhasePoint& x, double cap) const {
        double best = 1e18;
        int max_r = std::min(ncs / 2 + 1,
                             static_cast<int>(std::ceil(cap / cell)) + 2);
        for (int r = 0; r <= max_r; ++r) {
            if (best <= (r - 1) * cell) break;
            if ((r - 1) * cell > cap) break;
            visit_ring(x, r, [&](const PhasePoint& p, int32_t) {
                best = std::min(best, pdist(x, p));
            });
        }
        return best;
    }

    template <class F>
    void visit_radius(const PhasePoint& x, double radius, F&& f) const {
        int max_r = std::min(ncs / 2 + 1,
                             static_cast<int>(std::ceil(radius / cell)) + 1);
        for (int r = 0; r <= max_r; ++r)
            visit_ring(x, r, [&](const PhasePoint& p, int32_t i) {
                if (pdist(x, p) <= radius) f(p, i);
            });
    }
};

double bump(double u) {
    // 1 for u <= 1/4, 0 for u >= 1/2, C^2 in between; the half-radius support
    // keeps d(.,Gamma) comparable to the center's own distance on the support
    return smoothstep(2.0 - 4.0 * u);
}

}  // namespace

struct WhitneyFunction::Buckets {
    Idx gamma;
    // same point set in fat cells: ring walks stay short for far queries
    Idx gamma_far;
    double gamma_nearest(const PhasePoint& x, double cap) const {
        double near_cap = 4.0 * gamma.cell;
        double d = gamma.nearest(x, std::min(cap, near_cap));
        if (d <= near_cap) return d;
        return gamma_far.nearest(x, cap);
    }
    // centers grouped by support-radius class l: r in [2^l, 2^{l+1}) * sqrt(eps)
    struct Class {
        Idx idx;
        std::vector<double> d;  // distance of each stored center to Gamma
    };
    std::vector<Class> classes;
};

WhitneyFunction::WhitneyFunction(const DiscSystem& sys, std::vector<PhasePoint> gamma,
                                 double epsilon, double delta, double center_spacing)
    : ncharts_(sys.count()), eps_(epsilon), delta_(delta), gamma_(std::move(gamma)) {
    if (gamma_.empty()) throw std::invalid_argument("whitney: empty target set");
    if (!(delta_ > 0 && delta_ < 1.0 / 9.0))
        throw std::invalid_argument("whitney: separation delta must be in (0, 1/9)");
    const double se = std::sqrt(eps_);
    idx_ = std::make_shared<Buckets>();
    idx_->gamma.build(gamma_, se);
    idx_->gamma_far.build(gamma_, 0.16);

    // Candidate lattices per dyadic distance band, pruned block-wise; greedy
    // acceptance under the relative separation delta * (d + sqrt(eps)).
    Idx accepted;
    accepted.build({}, se);
    // separation 3*delta: a maximal delta-separated family keeps the coverage
    // lower bound but its overlap pushes the phi/(eps+d^2) ratio to ~50; the
    // thinned family stays within the intended comparability constant
    auto separated = [&](const PhasePoint& x, double d) {
        bool ok = true;
        accepted.visit_radius(x, 3.0 * delta_ * (d + se),
                              [&](const PhasePoint& y, int32_t i) {
                                  double dy = centers_[i].d;
                                  if (pdist(x, y) <
                                      3.0 * delta_ * (std::min(d, dy) + se))
                                      ok = false;
                              });
        return ok;
    };
    auto try_accept = [&](const PhasePoint& x, double d) {
        if (!separated(x, d)) return;
        int is = static_cast<int>(x.s / accepted.cell) % accepted.ncs;
        int ip = static_cast<int>(std::floor(x.p / accepted.cell));
        accepted.map[Idx::key(x.disc, is, ip)].push_back(
            static_cast<int32_t>(centers_.size()));
        accepted.pts.push_back(x);
        centers_.push_back({x, d});
    };

    const int levels = std::max(1, static_cast<int>(std::ceil(std::log2(8.0 / se))));
    for (int l = 0; l < levels; ++l) {
        double lo = (l == 0) ? se : std::ldexp(se, l);
        double hi = (l == levels - 1) ? 1e18 : std::ldexp(se, l + 1);
        // candidate spacing tracks the smallest support radius in the band,
        // delta * (lo + sqrt(eps)); finer lattices only add rejected points
        double sp = std::max(center_spacing, delta_ * (lo + se) / 2.0);
        double blk = std::max(std::min(hi, 8.0), 8.0 * sp);
        int nbs = std::max(1, static_cast<int>(std::ceil(kTwoPi / blk)));
        int nbp = std::max(1, static_cast<int>(std::ceil(2.0 / blk)));
        double bs = kTwoPi / nbs, bp = 2.0 / nbp;
        for (int disc = 0; disc < ncharts_; ++disc) {
            for (int ib = 0; ib < nbs; ++ib) {
                for (int jb = 0; jb < nbp; ++jb) {
                    PhasePoint c{disc, (ib + 0.5) * bs, -1.0 + (jb + 0.5) * bp};
                    double half = 0.5 * std::sqrt(bs * bs + bp * bp);
                    double dc = idx_->gamma_nearest(c, hi + half);
                    if (dc - half > hi || dc + half < lo) continue;
                    for (double s = ib * bs + sp / 2; s < (ib + 1) * bs; s += sp) {
                        for (double p = -1.0 + jb * bp + sp / 2;
                             p < -1.0 + (jb + 1) * bp && p < 1.0; p += sp) {
                            PhasePoint x{disc, s, p};
                            // cheap pre-reject with the band floor standing in
                            // for the true distance: its separation radius is
                            // no larger, so a clash here is a clash for real
                            if (!separated(x, lo)) continue;
                            double d = idx_->gamma_nearest(x, hi * 1.5);
                            if (d < lo || d >= hi) continue;
                            try_accept(x, d);
                        }
                    }
                }
            }
        }
    }

    // radius-class buckets for evaluation
    int nclass = 1;
    for (const auto& c : centers_) {
        int l = std::max(
            0, static_cast<int>(std::floor(std::log2((c.d + se) / se))));
        nclass = std::max(nclass, l + 1);
    }
    idx_->classes.resize(nclass);
    std::vector<std::vector<PhasePoint>> cpts(nclass);
    std::vector<std::vector<double>> cd(nclass);
    for (const auto& c : centers_) {
        int l = std::max(
            0, static_cast<int>(std::floor(std::log2((c.d + se) / se))));
        cpts[l].push_back(c.x);
        cd[l].push_back(c.d);
    }
    for (int l = 0; l < nclass; ++l) {
        idx_->classes[l].idx.build(std::move(cpts[l]), std::ldexp(se, l + 1));
        idx_->classes[l].d = std::move(cd[l]);
    }
}

double WhitneyFunction::query(const PhasePoint& x, bool count_only,
                              int* overlap) const {
    const double se = std::sqrt(eps_);
    double sum = eps_;
    int cnt = 0;
    for (const auto& cl : idx_->classes) {
        // every support radius in this class is <= its bucket cell size, so a
        // 3x3 cell neighbourhood suffices
        int is0 = static_cast<int>(std::floor(x.s / cl.idx.cell));
        int ip0 = static_cast<int>(std::floor(x.p / cl.idx.cell));
        for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                cl.idx.visit_cell(x.disc, is0 + di, ip0 + dj,
                                  [&](const PhasePoint& y, int32_t i) {
                                      double d = cl.d[i];
                                      double r = d + se;
                                      double u = pdist(x, y) / r;
                                      if (u >= 1.0) return;
                                      ++cnt;
                                      if (!count_only) sum += d * d * bump(u);
                                  });
            }
        }
    }
    if (overlap) *overlap = cnt;
    return sum;
}

double WhitneyFunction::eval(const PhasePoint& x) const {
    return query(x, false, nullptr);
}

int WhitneyFunction::overlap_count(const PhasePoint& x) const {
    int n = 0;
    query(x, true, &n);
    return n;
}

double WhitneyFunction::dist(const PhasePoint& x, double cap) const {
    return idx_->gamma_nearest(x, cap);
}

struct EscapeLab::PointIndex {
    Idx idx;
};

namespace {

PhaseRegion boxes_around(const std::vector<PhasePoint>& pts, int ncharts,
                         double margin) {
    PhaseRegion reg;
    for (int j = 0; j < ncharts; ++j) {
        std::vector<double> ss;
        double p_lo = 1e18, p_hi = -1e18;
        for (const auto& rho : pts)
            if (rho.disc == j) {
                ss.push_back(rho.s);
                p_lo = std::min(p_lo, rho.p);
                p_hi = std::max(p_hi, rho.p);
            }
        if (ss.empty()) continue;
        // smallest circular arc containing all s values: complement of the
        // largest gap between consecutive (sorted) samples
        std::sort(ss.begin(), ss.end());
        double gap = kTwoPi - (ss.back() - ss.front());
        double s_lo = ss.front(), s_hi = ss.back();
        for (size_t i = 1; i < ss.size(); ++i)
            if (ss[i] - ss[i - 1] > gap) {
                gap = ss[i] - ss[i - 1];
                s_lo = ss[i];
                s_hi = ss[i - 1] + kTwoPi;
            }
        reg.boxes.push_back(
            {j, s_lo - margin, s_hi + margin, p_lo - margin, p_hi + margin});
    }
    return reg;
}

double box_ramp(double x, double inner_lo, double inner_hi, double outer_lo,
                double outer_hi) {
    if (x < inner_lo) return smoothstep((x - outer_lo) / (inner_lo - outer_lo));
    if (x > inner_hi) return smoothstep((outer_hi - x) / (outer_hi - inner_hi));
    return 1.0;
}

}  // namespace

EscapeLab::EscapeLab(const DiscSystem& sys, const EscapeParams& params)
    : sys_(sys), par_(params) {
    const double se = std::sqrt(par_.epsilon);
    double gsp = std::min(0.008, se / 2.0);
    int ns = static_cast<int>(std::ceil(kTwoPi / gsp));
    int np = static_cast<int>(std::ceil(2.0 / gsp));

    // survivor strips of depth d have width ~ Lambda^-d; grid sampling only
    // resolves them while that width stays above the grid spacing, so cap the
    // sampling depth accordingly (estimated per-bounce expansion rate)
    double loglam = std::log(3.0);
    {
        double acc = 0;
        int cnt = 0;
        for (int j = 0; j < sys_.count(); ++j)
            for (int is = 0; is < 48; ++is)
                for (int ip = 0; ip < 48; ++ip) {
                    PhasePoint r{j, (is + 0.5) * kTwoPi / 48,
                                 -1.0 + (ip + 0.5) * 2.0 / 48};
                    StepResult s1 = step(sys_, r);
                    if (s1.kind != StepKind::Forward) continue;
                    StepResult s2 = step(sys_, *s1.next);
                    if (s2.kind != StepKind::Forward) continue;
                    Mat2 J = jacobian(sys_, r);
                    double n1 = std::abs(J[0][0]) + std::abs(J[0][1]);
                    double n2 = std::abs(J[1][0]) + std::abs(J[1][1]);
                    acc += std::log(std::max(n1, n2));
                    ++cnt;
                }
        if (cnt > 0) loglam = std::max(0.5, acc / cnt);
    }
    int d_sample = std::clamp(
        static_cast<int>(std::ceil(std::log(1.0 / gsp) / loglam)), 2,
        par_.tail_depth);

    trap_ = trapped_sample(sys_, d_sample, ns / 8, np / 8).points;
    tail_minus_ = tail_sample(sys_, d_sample, ns, np, true).points;
    tail_plus_ = tail_sample(sys_, d_sample, ns, np, false).points;
    if (trap_.empty())
        throw std::runtime_error("escape lab: empty trapped sample");

    double csp = par_.delta * se / 2.0;
    wh_plus_ = std::make_unique<WhitneyFunction>(sys_, tail_plus_, par_.epsilon,
                                                 par_.delta, csp);
    wh_minus_ = std::make_unique<WhitneyFunction>(sys_, tail_minus_, par_.epsilon,
                                                  par_.delta, csp);
    trap_idx_ = std::make_shared<PointIndex>();
    trap_idx_->idx.build(trap_, 0.02);

    // far-field caps for the saturated summed functions: the largest value a
    // single summand attains over the working domain
    for (int j = 0; j < sys_.count(); ++j)
        for (double s = 0.025; s < kTwoPi; s += 0.05)
            for (double p = -0.975; p < 1.0; p += 0.05) {
                PhasePoint x{j, s, p};
                sat_plus_ = std::max(sat_plus_, wh_plus_->eval(x));
                sat_minus_ = std::max(sat_minus_, wh_minus_->eval(x));
            }

    const double m1 = 0.06, m2 = 0.16, m3 = 0.28, m4 = 0.40;
    W_.W1 = boxes_around(trap_, sys_.count(), m1);
    W_.W2 = boxes_around(trap_, sys_.count(), m2);
    W_.W3 = boxes_around(trap_, sys_.count(), m3);
    W_.W4 = boxes_around(trap_, sys_.count(), m4);
    for (const auto& b : boxes_around(trap_, sys_.count(), m4 + 0.25).boxes)
        domain_.push_back(b);

    build_cover(true, cover_fwd_);
    build_cover(false, cover_bwd_);
    for (const auto& c : cover_fwd_) max_n_fwd_ = std::max(max_n_fwd_, c.n_escape);
    for (const auto& c : cover_bwd_) max_n_bwd_ = std::max(max_n_bwd_, c.n_escape);
    cover_fwd_idx_ = std::make_shared<PointIndex>();
    cover_bwd_idx_ = std::make_shared<PointIndex>();
    std::vector<PhasePoint> cp;
    for (const auto& c : cover_fwd_) cp.push_back(c.x);
    cover_fwd_idx_->idx.build(cp, 2.0 * cover_spacing_);
    cp.clear();
    for (const auto& c : cover_bwd_) cp.push_back(c.x);
    cover_bwd_idx_->idx.build(cp, 2.0 * cover_spacing_);

    // calibrate the gluing weight from the empirical size of the flattened
    // quotient
    if (par_.C5 > 0) {
        c5_ = par_.C5;
    } else {
        double c6 = 0;
        for (const auto& b : W_.W4.boxes) {
            for (double s = b.s_lo; s <= b.s_hi; s += 0.04) {
                for (double p = std::max(-0.999, b.p_lo);
                     p <= std::min(0.999, b.p_hi); p += 0.04) {
                    c6 = std::max(c6, std::abs(g_hat_sat({b.disc, s, p})));
                }
            }
        }
        c5_ = 10.0 * c6 / std::log(1.0 / par_.epsilon);
        if (c5_ <= 0) c5_ = 1.0;
    }
}

void EscapeLab::build_cover(bool forward, std::vector<CoverCenter>& out) const {
    for (const auto& b : W_.W4.boxes) {
        for (double s = b.s_lo; s <= b.s_hi; s += cover_spacing_) {
            for (double p = std::max(-0.999, b.p_lo); p <= std::min(0.999, b.p_hi);
                 p += cover_spacing_) {
                PhasePoint x{b.disc, s, p};
                double dtail = forward ? dist_Tminus(x) : dist_Tplus(x);
                if (dtail < par_.tail_radius) continue;
                PhasePoint cur = x;
                int n = -1;
                for (int k = 1; k <= par_.escape_cap; ++k) {
                    StepResult sr = forward ? step(sys_, cur) : step_back(sys_, cur);
                    if (sr.kind == StepKind::Escaped) {
                        n = k;
                        break;
                    }
                    cur = *sr.next;
                    if (!W_.W4.contains(cur)) {
                        n = k;
                        break;
                    }
                }
                if (n < 0)
                    throw std::runtime_error(
                        "escape lab: cover point exceeded the escape-time cap");
                out.push_back({x, n});
            }
        }
    }
}

std::optional<double> EscapeLab::phi_hat_plus(const PhasePoint& rho) const {
    double sum = 0;
    PhasePoint cur = rho;
    for (int k = 0; k <= par_.K; ++k) {
        sum += wh_plus_->eval(cur);
        if (k == par_.K) break;
        StepResult sr = step(sys_, cur);
        // orbits leaving the working neighbourhood W3 are masked: the tail
        // samples only resolve distances away from the glancing band
        if (sr.kind == StepKind::Escaped || !W_.W3.contains(*sr.next))
            return std::nullopt;
        cur = *sr.next;
    }
    return sum;
}

std::optional<double> EscapeLab::phi_hat_minus(const PhasePoint& rho) const {
    double sum = 0;
    PhasePoint cur = rho;
    for (int k = 0; k <= par_.K; ++k) {
        sum += wh_minus_->eval(cur);
        if (k == par_.K) break;
        StepResult sr = step_back(sys_, cur);
        if (sr.kind == StepKind::Escaped || !W_.W3.contains(*sr.next))
            return std::nullopt;
        cur = *sr.next;
    }
    return sum;
}

std::optional<double> EscapeLab::g_hat(const PhasePoint& rho) const {
    auto fp = phi_hat_plus(rho), fm = phi_hat_minus(rho);
    if (!fp || !fm) return std::nullopt;
    double me = par_.M * par_.epsilon;
    return std::log(me + *fm) - std::log(me + *fp);
}

double EscapeLab::phi_hat_plus_sat(const PhasePoint& rho) const {
    double sum = 0;
    PhasePoint cur = rho;
    bool alive = true;
    for (int k = 0; k <= par_.K; ++k) {
        sum += alive ? wh_plus_->eval(cur) : sat_plus_;
        if (k == par_.K || !alive) continue;
        StepResult sr = step(sys_, cur);
        if (sr.kind == StepKind::Escaped || !W_.W3.contains(*sr.next))
            alive = false;
        else
            cur = *sr.next;
    }
    return sum;
}

double EscapeLab::phi_hat_minus_sat(const PhasePoint& rho) const {
    double sum = 0;
    PhasePoint cur = rho;
    bool alive = true;
    for (int k = 0; k <= par_.K; ++k) {
        sum += alive ? wh_minus_->eval(cur) : sat_minus_;
        if (k == par_.K || !alive) continue;
        StepResult sr = step_back(sys_, cur);
        if (sr.kind == StepKind::Escaped || !W_.W3.contains(*sr.next))
            alive = false;
        else
            cur = *sr.next;
    }
    return sum;
}

double EscapeLab::g_hat_sat(const PhasePoint& rho) const {
    double me = par_.M * par_.epsilon;
    return std::log(me + phi_hat_minus_sat(rho)) -
           std::log(me + phi_hat_plus_sat(rho));
}

double EscapeLab::one_sided(const std::vector<CoverCenter>& centers, bool forward,
                            const PhasePoint& rho) const {
    const Idx& idx = forward ? cover_fwd_idx_->idx : cover_bwd_idx_->idx;
    const int max_n = forward ? max_n_fwd_ : max_n_bwd_;
    const double r_out = 1.6 * cover_spacing_, r_in = 0.8 * cover_spacing_;
    double sum = 0;
    PhasePoint cur = rho;
    for (int k = 0; k <= max_n; ++k) {
        idx.visit_radius(cur, r_out, [&](const PhasePoint& y, int32_t i) {
            if (k > centers[i].n_escape) return;
            double d = pdist(cur, y);
            sum += (k + 1) * smoothstep((r_out - d) / (r_out - r_in));
        });
        if (k == max_n) break;
        StepResult sr = forward ? step_back(sys_, cur) : step(sys_, cur);
        if (sr.kind == StepKind::Escaped) break;
        cur = *sr.next;
        // stop at the W4 boundary: keeps the telescoping increments
        // nonnegative inside W4 even for orbits that later re-enter
        if (!W_.W4.contains(cur)) break;
    }
    return sum;
}

double EscapeLab::g_plus(const PhasePoint& rho) const {
    return one_sided(cover_fwd_, true, rho);
}

double EscapeLab::g_minus(const PhasePoint& rho) const {
    return -one_sided(cover_bwd_, false, rho);
}

double EscapeLab::g0(const PhasePoint& rho) const {
    return g_plus(rho) + g_minus(rho);
}

double EscapeLab::chi(const PhasePoint& rho) const {
    for (size_t i = 0; i < W_.W3.boxes.size(); ++i) {
        const auto& b3 = W_.W3.boxes[i];
        if (b3.disc != rho.disc) continue;
        const auto& b4 = W_.W4.boxes[i];
        // unwrap s to the representative nearest the box midpoint
        double mid = 0.5 * (b4.s_lo + b4.s_hi), s = rho.s;
        while (s - mid > M_PI) s -= kTwoPi;
        while (mid - s > M_PI) s += kTwoPi;
        return box_ramp(s, b3.s_lo, b3.s_hi, b4.s_lo, b4.s_hi) *
               box_ramp(rho.p, b3.p_lo, b3.p_hi, b4.p_lo, b4.p_hi);
    }
    return 0.0;
}

std::optional<double> EscapeLab::G(const PhasePoint& rho) const {
    double c = chi(rho);
    double far = c5_ * std::log(1.0 / par_.epsilon) * g0(rho);
    if (c == 0.0) return far;
    return c * g_hat_sat(rho) + far;
}

double EscapeLab::dist_T(const PhasePoint& rho) const {
    return trap_idx_->idx.nearest(rho, 0.5);
}

bool EscapeLab::in_Vminus(const PhasePoint& rho) const {
    return dist_Tminus(rho) < par_.tail_radius;
}

bool EscapeLab::in_Vplus(const PhasePoint& rho) const {
    return dist_Tplus(rho) < par_.tail_radius;
}

bool EscapeLab::in_vanishing_core(const PhasePoint& rho) const {
    double r = par_.tail_radius / 3.0;
    return dist_Tplus(rho) < r && dist_Tminus(rho) < r;
}

GridFunction EscapeLab::sample(
    const std::function<std::optional<double>(const PhasePoint&)>& f,
    double spacing) const {
    if (spacing <= 0) spacing = std::sqrt(par_.epsilon) / 4.0;
    GridFunction g;
    g.epsilon = par_.epsilon;
    for (const auto& b : domain_) {
        GridFunction::Chart c;
        c.disc = b.disc;
        c.s = {b.s_lo, b.s_hi,
               std::max(1, static_cast<int>(std::ceil((b.s_hi - b.s_lo) / spacing)))};
        double plo = std::max(-1.0, b.p_lo), phi = std::min(1.0, b.p_hi);
        c.p = {plo, phi,
               std::max(1, static_cast<int>(std::ceil((phi - plo) / spacing)))};
        c.v.assign(static_cast<size_t>(c.s.n) * c.p.n, 0.0);
        c.mask.assign(c.v.size(), 0);
        for (int is = 0; is < c.s.n; ++is) {
            for (int ip = 0; ip < c.p.n; ++ip) {
                auto v = f(c.point(is, ip));
                if (v) {
                    c.v[c.idx(is, ip)] = *v;
                    c.mask[c.idx(is, ip)] = 1;
                }
            }
        }
        g.charts.push_back(std::move(c));
    }
    return g;
}

LinearModelReport linear_model_check(double lambda, int samples, unsigned seed) {
    LinearModelReport rep;
    rep.expected_coercivity =
        std::min(lambda * lambda - 1.0, 1.0 - 1.0 / (lambda * lambda));
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 1e18;
    for (int i = 0; i < samples; ++i) {
        double x = u(rng), xi = u(rng);
        double n2 = x * x + xi * xi;
        if (n2 < 1e-12) continue;
        double G0 = x * x - xi * xi;
        double X = lambda * x, Xi = xi / lambda;
        double G1 = X * X - Xi * Xi;
        worst = std::min(worst, (G1 - G0) / n2);
    }
    rep.min_coercivity = worst;
    rep.ok = worst >= rep.expected_coercivity - 1e-12;
    return rep;
}

}  // namespace fwl
