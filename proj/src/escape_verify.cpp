#include <json.hpp>

#include <algorithm>
#include <cmath>

#include "fwl/escape.hpp"
#include "fwl/orbits.hpp"

namespace fwl {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Pinned suite constants. Each bound below is asserted with these fixed
// values across the whole epsilon sweep; the empirically attained constants
// are reported alongside so drift is visible before it becomes a failure.
constexpr double kC0 = 10.0;        // additive slack in the monotone bound
constexpr double kMonotoneC = 10.0; // phi-hat decays by at least 1/C per step
constexpr double kOnTrapC = 10.0;   // phi-hat <= C (K+1) eps on trapped orbits
constexpr double kSumEquivC = 20.0; // (phi+ + phi-) / (d^2 + eps) in [1/C, C]
constexpr double kLogBoundC = 0.01; // |flattened| <= C log(1/eps)
constexpr double kSmallM = 10.0;    // flattening for the sensitivity variant
constexpr double kDiffQuotC = 100.0;  // |d phi-hat| <= C sqrt(phi-hat)
constexpr double kCoreTol = 1e-12;
constexpr double kMonoTol = 1e-9;
constexpr double kGluedLogC = 150.0;  // |G| <= C log(1/eps)
constexpr double kGluedIncC = 1.0;    // G increment >= C log(1/eps) outside W2
constexpr double kOrderN1 = 500.0;    // pinned order-function exponent

struct Acc {
    IneqCheck c;
    explicit Acc(std::string name) { c.name = std::move(name); }
    void add(double margin, const PhasePoint& at) {
        ++c.checked;
        if (margin < 0) ++c.violations;
        if (margin < c.worst_margin) {
            c.worst_margin = margin;
            c.worst_at = at;
        }
    }
};

}  // namespace

bool EscapeReport::all_ok() const {
    for (const auto& c : checks)
        if (!c.ok()) return false;
    return true;
}

const IneqCheck* EscapeReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

EscapeReport verify_escape(const EscapeLab& lab) {
    const DiscSystem& sys = lab.system();
    const EscapeParams& par = lab.params();
    const double eps = par.epsilon;
    const double le = std::log(1.0 / eps);
    const double me = par.M * eps;

    EscapeReport rep;
    rep.epsilon = eps;
    rep.K = par.K;

    Acc on_trap("phi-hat-on-trapped-orbits");
    Acc mono_p("monotone-escape-plus");
    Acc mono_m("monotone-escape-minus");
    Acc sum_eq("sum-equivalence");
    Acc flat_log("flattened-log-bound");
    Acc flat_far("flattened-increment-far");
    Acc flat_far_sm("flattened-increment-far-small-M");
    Acc diff_q("difference-quotient-bound");
    Acc g0_core("far-field-vanishing-core");
    Acc g0_mono("far-field-monotone");
    Acc g0_outer("far-field-increment-outer");
    Acc glued_log("glued-log-bound");
    Acc glued_outer("glued-increment-outer");
    Acc orderf("order-function");

    // exact trapped points: phi-hat stays at the epsilon floor
    for (const auto& orb : all_orbits(sys, 5)) {
        if (!orb.realized) continue;
        for (const auto& r : orb.points) {
            auto pp = lab.phi_hat_plus(r), pm = lab.phi_hat_minus(r);
            if (!pp || !pm) continue;
            double cap = kOnTrapC * (par.K + 1) * eps;
            on_trap.add(cap - std::max(*pp, *pm), r);
        }
    }

    // The fine grid only matters near the trapped set (everything farther is
    // masked anyway); a coarse distance mask avoids paying the nearest-point
    // search at every fine cell of the full domain.
    GridFunction coarse = lab.sample(
        [&](const PhasePoint& r) -> std::optional<double> {
            if (lab.dist_T(r) > 0.16) return std::nullopt;
            return 1.0;
        },
        0.02);
    auto near_trap = [&](const PhasePoint& r) -> bool {
        for (const auto& ch : coarse.charts) {
            if (ch.disc != r.disc) continue;
            double s = r.s, mid = 0.5 * (ch.s.lo + ch.s.hi);
            while (s - mid > M_PI) s -= kTwoPi;
            while (mid - s > M_PI) s += kTwoPi;
            int is = static_cast<int>((s - ch.s.lo) / (ch.s.hi - ch.s.lo) * ch.s.n);
            int ip = static_cast<int>((r.p - ch.p.lo) / (ch.p.hi - ch.p.lo) * ch.p.n);
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    int i2 = is + di, j2 = ip + dj;
                    if (i2 < 0 || i2 >= ch.s.n || j2 < 0 || j2 >= ch.p.n) continue;
                    if (ch.mask[ch.idx(i2, j2)]) return true;
                }
        }
        return false;
    };

    int considered = 0;
    GridFunction fine = lab.sample([&](const PhasePoint& r) -> std::optional<double> {
        if (!near_trap(r)) return std::nullopt;
        ++considered;
        return lab.g_hat(r);
    });

    double mono_ratio_p = 1e18, mono_ratio_m = 1e18;
    double sum_lo = 1e18, sum_hi = 0, flat_sup = 0, dq_sup = 0;
    double far_min = 1e18, far_sm_min = 1e18;
    for (const auto& ch : fine.charts) {
        for (int is = 0; is < ch.s.n; ++is) {
            for (int ip = 0; ip < ch.p.n; ++ip) {
                if (!ch.mask[ch.idx(is, ip)]) continue;
                PhasePoint r = ch.point(is, ip);
                ++rep.unmasked;
                double gh = ch.v[ch.idx(is, ip)];
                flat_sup = std::max(flat_sup, std::abs(gh));
                flat_log.add(kLogBoundC * le - std::abs(gh), r);
                auto pp = lab.phi_hat_plus(r), pm = lab.phi_hat_minus(r);
                double d = lab.dist_T(r), d2 = d * d;
                double q = (*pp + *pm) / (d2 + eps);
                sum_lo = std::min(sum_lo, q);
                sum_hi = std::max(sum_hi, q);
                sum_eq.add(std::min(q - 1.0 / kSumEquivC, kSumEquivC - q), r);
                if (is + 1 < ch.s.n && ch.mask[ch.idx(is + 1, ip)]) {
                    PhasePoint r2 = ch.point(is + 1, ip);
                    auto pp2 = lab.phi_hat_plus(r2);
                    auto pm2 = lab.phi_hat_minus(r2);
                    double h = r2.s - r.s;
                    double dq = std::max(std::abs(*pp2 - *pp) / h / std::sqrt(*pp),
                                         std::abs(*pm2 - *pm) / h / std::sqrt(*pm));
                    dq_sup = std::max(dq_sup, dq);
                    diff_q.add(kDiffQuotC - dq, r);
                }
                StepResult sr = step(sys, r);
                if (sr.kind != StepKind::Forward) continue;
                auto ppf = lab.phi_hat_plus(*sr.next);
                auto pmf = lab.phi_hat_minus(*sr.next);
                if (ppf) {
                    double ratio = ((*pp - *ppf) + kC0 * eps) / *pp;
                    mono_ratio_p = std::min(mono_ratio_p, ratio);
                    mono_p.add(ratio - 1.0 / kMonotoneC, r);
                }
                if (pmf) {
                    double ratio = ((*pmf - *pm) + kC0 * eps) / *pmf;
                    mono_ratio_m = std::min(mono_ratio_m, ratio);
                    mono_m.add(ratio - 1.0 / kMonotoneC, r);
                }
                if (ppf && pmf && d2 >= par.C1 * eps) {
                    // at the suite flattening the far increment must be
                    // positive; the small-M variant sees the full 1/C1 jump
                    // (with M ~ 10^3 the quotient is flattened below it)
                    double ghf = std::log(me + *pmf) - std::log(me + *ppf);
                    far_min = std::min(far_min, ghf - gh);
                    flat_far.add(ghf - gh, r);
                    double sm = kSmallM * eps;
                    double a = std::log(sm + *pm) - std::log(sm + *pp);
                    double b = std::log(sm + *pmf) - std::log(sm + *ppf);
                    far_sm_min = std::min(far_sm_min, b - a);
                    flat_far_sm.add((b - a) - 1.0 / par.C1, r);
                }
            }
        }
    }
    rep.masked = considered - rep.unmasked;

    // coarse sweep for the far-field and glued functions (defined everywhere)
    double g0_outer_min = 1e18, glued_sup = 0, glued_inc_min = 1e18;
    std::vector<PhasePoint> opts;
    std::vector<double> ovals;
    GridFunction gc = lab.sample(
        [&](const PhasePoint&) -> std::optional<double> { return 0.0; }, 0.02);
    for (const auto& ch : gc.charts) {
        for (int is = 0; is < ch.s.n; ++is) {
            for (int ip = 0; ip < ch.p.n; ++ip) {
                PhasePoint r = ch.point(is, ip);
                double g0 = lab.g0(r);
                if (lab.in_vanishing_core(r))
                    g0_core.add(kCoreTol - std::abs(g0), r);
                double G = *lab.G(r);
                glued_sup = std::max(glued_sup, std::abs(G));
                glued_log.add(kGluedLogC * le - std::abs(G), r);
                if ((is % 5) == 0 && (ip % 5) == 0) {
                    opts.push_back(r);
                    ovals.push_back(G);
                }
                StepResult sr = step(sys, r);
                if (sr.kind != StepKind::Forward || !lab.W().W3.contains(r))
                    continue;
                double inc = lab.g0(*sr.next) - g0;
                g0_mono.add(inc + kMonoTol, r);
                if (!lab.W().W2.contains(r)) {
                    g0_outer_min = std::min(g0_outer_min, inc);
                    g0_outer.add(inc - 1.0, r);
                    double Ginc = *lab.G(*sr.next) - G;
                    glued_inc_min = std::min(glued_inc_min, Ginc);
                    glued_outer.add(Ginc - kGluedIncC * le, r);
                }
            }
        }
    }

    // order-function bound over subsampled grid pairs: exp(G(r) - G(m)) must
    // be dominated by a polynomial in the sqrt(eps)-scaled separation
    double n1_fit = 0;
    for (size_t a = 0; a < opts.size(); a += 7) {
        for (size_t b = 0; b < opts.size(); b += 11) {
            if (opts[a].disc != opts[b].disc) continue;
            double ds = std::remainder(opts[a].s - opts[b].s, kTwoPi);
            double dp = opts[a].p - opts[b].p;
            double lbr =
                0.5 * std::log1p((ds * ds + dp * dp) / eps);  // log <dr/sqrt(eps)>
            double dG = ovals[a] - ovals[b];
            if (lbr > 0) n1_fit = std::max(n1_fit, dG / lbr);
            orderf.add(kOrderN1 * lbr - dG, opts[a]);
        }
    }

    for (Acc* a : {&on_trap, &mono_p, &mono_m, &sum_eq, &flat_log, &flat_far,
                   &flat_far_sm, &diff_q, &g0_core, &g0_mono, &g0_outer,
                   &glued_log, &glued_outer, &orderf})
        rep.checks.push_back(a->c);

    rep.constants = {
        {"monotone_ratio_plus", mono_ratio_p},
        {"monotone_ratio_minus", mono_ratio_m},
        {"sum_equiv_lo", sum_lo},
        {"sum_equiv_hi", sum_hi},
        {"flattened_sup_over_log", flat_sup / le},
        {"far_min_increment", far_min},
        {"far_small_M_min_increment", far_sm_min},
        {"far_points", static_cast<double>(flat_far.c.checked)},
        {"diff_quotient_sup", dq_sup},
        {"far_field_outer_min_increment", g0_outer_min},
        {"glued_sup_over_log", glued_sup / le},
        {"glued_outer_min_increment_over_log", glued_inc_min / le},
        {"order_exponent_fitted", n1_fit},
    };
    return rep;
}

std::string escape_report_json(const EscapeReport& rep) {
    nlohmann::json j;
    j["epsilon"] = rep.epsilon;
    j["K"] = rep.K;
    j["unmasked"] = rep.unmasked;
    j["masked"] = rep.masked;
    j["all_ok"] = rep.all_ok();
    for (const auto& c : rep.checks) {
        nlohmann::json jc;
        jc["checked"] = c.checked;
        jc["violations"] = c.violations;
        jc["worst_margin"] = c.worst_margin;
        jc["worst_at"] = {c.worst_at.disc, c.worst_at.s, c.worst_at.p};
        j["checks"][c.name] = jc;
    }
    for (const auto& [k, v] : rep.constants) j["constants"][k] = v;
    return j.dump(2);
}

}  // namespace fwl
