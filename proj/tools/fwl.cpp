// fwl: numerical laboratory for open disc billiards, their trapped-set
// dimensions, escape functions, scattering resonances and open quantum maps.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "fwl/billiard.hpp"
#include "fwl/dimension.hpp"
#include "fwl/escape.hpp"
#include "fwl/geometry.hpp"
#include "fwl/grid.hpp"
#include "fwl/manifest.hpp"
#include "fwl/open_map.hpp"
#include "fwl/orbits.hpp"
#include "fwl/resonances.hpp"

namespace {

std::string now_iso() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

fwl::RunManifest make_manifest(const std::string& sub, const std::string& config,
                               std::map<std::string, std::string> params) {
    fwl::RunManifest m;
    m.subcommand = sub;
    m.config_hash = config.empty() ? "none" : fwl::file_hash(config);
    m.params = std::move(params);
    m.code_version = fwl::kCodeVersion;
    m.timestamp = now_iso();
    return m;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

int cmd_ikawa(const std::string& config) {
    fwl::DiscSystem sys = fwl::load_system_file(config);
    fwl::IkawaReport rep = fwl::check_ikawa(sys);
    if (rep.satisfied) {
        std::cout << "satisfied\n";
    } else {
        std::cout << "violated:";
        for (const auto& v : rep.violations)
            std::cout << " (k=" << v.k << ",j=" << v.j << ",l=" << v.l
                      << ",margin=" << v.hull_distance << ")";
        std::cout << "\n";
    }
    return 0;
}

int cmd_orbits(const std::string& config, int max_period, const std::string& out) {
    fwl::DiscSystem sys = fwl::load_system_file(config);
    auto orbits = fwl::all_orbits(sys, max_period);
    std::ofstream f(out);
    f << "word,period,length,lambda\n";
    for (const auto& o : orbits) {
        for (size_t i = 0; i < o.word.size(); ++i) f << o.word[i];
        f << "," << o.word.size() << "," << std::setprecision(17) << o.length << ","
          << o.lambda << "\n";
    }
    auto m = make_manifest("orbits", config, {{"max_period", std::to_string(max_period)}});
    m.outputs = {out};
    m.write(out + ".manifest.json");
    std::cout << "orbits: " << orbits.size() << " prime orbits up to period "
              << max_period << " -> " << out << "\n";
    return 0;
}

int cmd_trapped(const std::string& config, int depth, int ns, int np,
                const std::string& prefix) {
    fwl::DiscSystem sys = fwl::load_system_file(config);
    fwl::TrappedSample sample = fwl::trapped_sample(sys, depth, ns, np);
    fwl::write_sample_csv(sample, prefix + ".csv");
    fwl::write_sample_grid(sys, sample, prefix + ".grid");
    auto m = make_manifest("trapped-set", config,
                           {{"depth", std::to_string(depth)},
                            {"ns", std::to_string(ns)},
                            {"np", std::to_string(np)}});
    m.outputs = {prefix + ".csv", prefix + ".grid"};
    m.write(prefix + ".manifest.json");
    std::cout << "trapped-set: " << sample.points.size() << " surviving points -> "
              << prefix << ".csv\n";
    return 0;
}

int cmd_dimension(const std::string& config, const std::string& method,
                  int max_period, int depth, const std::string& out) {
    fwl::DiscSystem sys = fwl::load_system_file(config);
    nlohmann::json j;
    if (method == "pressure" || method == "both") {
        auto orbits = fwl::all_orbits(sys, max_period);
        auto est = fwl::pressure_dimension(orbits, max_period);
        auto rate = fwl::escape_rate(orbits, max_period);
        j["pressure"] = nlohmann::json::parse(fwl::dimension_report_json(est, &rate));
    }
    if (method == "box" || method == "both") {
        auto sample = fwl::trapped_sample(sys, depth, 2048, 1024);
        std::vector<double> scales;
        for (double e = 0.1; e >= 0.002; e /= 1.6) scales.push_back(e);
        auto est = fwl::box_dimension(sample, scales);
        j["box"] = nlohmann::json::parse(fwl::dimension_report_json(est));
    }
    std::string text = j.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out);
        f << text;
        auto m = make_manifest("dimension", config,
                               {{"method", method},
                                {"max_period", std::to_string(max_period)},
                                {"depth", std::to_string(depth)}});
        m.outputs = {out};
        m.write(out + ".manifest.json");
        std::cout << "dimension -> " << out << "\n";
    }
    return 0;
}

int cmd_escape(const std::string& config, double epsilon, int depth_K, bool verify,
               const std::string& prefix) {
    fwl::DiscSystem sys = fwl::load_system_file(config);
    fwl::EscapeParams par;
    par.epsilon = epsilon;
    if (depth_K > 0) par.K = depth_K;
    fwl::EscapeLab lab(sys, par);
    auto g = lab.sample([&](const fwl::PhasePoint& r) { return lab.G(r); });
    fwl::write_grid(g, prefix + ".grid");
    fwl::write_grid_csv(g, prefix + ".csv");
    nlohmann::json j;
    j["epsilon"] = epsilon;
    j["C5"] = lab.C5_effective();
    j["cells"] = g.total_cells();
    j["valid_cells"] = g.valid_cells();
    std::ofstream(prefix + ".json") << j.dump(2) << "\n";
    std::vector<std::string> outputs = {prefix + ".grid", prefix + ".csv",
                                        prefix + ".json"};
    int rc = 0;
    if (verify) {
        fwl::EscapeReport rep = fwl::verify_escape(lab);
        std::ofstream(prefix + ".report.json") << fwl::escape_report_json(rep)
                                               << "\n";
        outputs.push_back(prefix + ".report.json");
        for (const auto& c : rep.checks)
            std::cout << "  " << (c.ok() ? "ok  " : "FAIL") << " " << c.name
                      << " (" << c.checked << " pts, worst margin "
                      << c.worst_margin << ")\n";
        if (!rep.all_ok()) rc = 1;
    }
    auto m = make_manifest("escape-fn", config, {{"epsilon", std::to_string(epsilon)}});
    m.outputs = outputs;
    m.write(prefix + ".manifest.json");
    std::cout << "escape-fn: sampled glued escape function on " << g.total_cells()
              << " cells -> " << prefix << ".grid\n";
    return rc;
}

int cmd_resonances(const std::string& config, double re_min, double re_max,
                   double im_min, double im_max, const std::string& grid,
                   bool symmetry, int m_max, const std::string& out) {
    fwl::DiscSystem sys = fwl::load_system_file(config);
    fwl::ResonanceOptions opt;
    opt.use_symmetry = symmetry;
    opt.m_max = m_max;
    if (!grid.empty()) {
        auto x = grid.find('x');
        if (x == std::string::npos)
            throw CLI::ValidationError("--grid expects NxM");
        opt.grid_re = std::stoi(grid.substr(0, x));
        opt.grid_im = std::stoi(grid.substr(x + 1));
    }
    auto m = make_manifest(
        "resonances", config,
        {{"re_min", std::to_string(re_min)},
         {"re_max", std::to_string(re_max)},
         {"im_min", std::to_string(im_min)},
         {"im_max", std::to_string(im_max)},
         {"grid", grid},
         {"symmetry", symmetry ? "1" : "0"},
         {"m_max", std::to_string(m_max)}});
    // result-level memoization keyed by the manifest hash
    const char* cache = std::getenv("FWL_CACHE_DIR");
    std::string cache_file;
    if (cache) cache_file = std::string(cache) + "/resonances-" + m.hash() + ".csv";
    std::vector<fwl::Resonance> res;
    bool from_cache = false;
    if (!cache_file.empty()) {
        std::ifstream probe(cache_file);
        if (probe) {
            res = fwl::read_resonances_csv(cache_file);
            from_cache = true;
        }
    }
    if (!from_cache)
        res = fwl::find_resonances(sys, re_min, re_max, im_min, im_max, opt);
    fwl::write_resonances_csv(res, out);
    if (!cache_file.empty() && !from_cache) fwl::write_resonances_csv(res, cache_file);
    m.outputs = {out};
    m.write(out + ".manifest.json");
    std::cout << "resonances: " << res.size() << (from_cache ? " (cached)" : "")
              << " -> " << out << "\n";
    return 0;
}

int cmd_weyl_fit(const std::string& input, double alpha, double r_min, double r_max,
                 int r_steps, const std::string& out) {
    auto res = fwl::read_resonances_csv(input);
    std::vector<double> rs;
    for (int i = 0; i < r_steps; ++i)
        rs.push_back(r_min + (r_max - r_min) * i / std::max(1, r_steps - 1));
    auto fit = fwl::weyl_fit(res, alpha, rs);
    nlohmann::json j;
    j["alpha"] = alpha;
    j["fitted"] = fit.fitted;
    j["slope"] = fit.slope;
    j["prefactor"] = fit.prefactor;
    j["window_slope"] = fit.window_slope;
    std::string jpath = out + ".json", cpath = out + ".csv";
    std::ofstream(jpath) << j.dump(2) << "\n";
    std::ofstream csv(cpath);
    csv << "kind,r,value\n";
    for (size_t i = 0; i < fit.r.size(); ++i)
        csv << "cumulative," << fit.r[i] << "," << fit.N[i] << "\n";
    for (size_t i = 0; i < fit.window_r.size(); ++i)
        csv << "window," << fit.window_r[i] << "," << fit.window_counts[i] << "\n";
    auto m = make_manifest("weyl-fit", input,
                           {{"alpha", std::to_string(alpha)},
                            {"r_min", std::to_string(r_min)},
                            {"r_max", std::to_string(r_max)},
                            {"r_steps", std::to_string(r_steps)}});
    m.outputs = {jpath, cpath};
    m.write(out + ".manifest.json");
    std::cout << "weyl-fit: slope " << fit.slope << ", window slope "
              << fit.window_slope << " -> " << jpath << "\n";
    return 0;
}

int cmd_baker(const std::string& n_list, const std::string& r_list,
              const std::string& prefix) {
    auto Ns = parse_int_list(n_list);
    auto rs = parse_double_list(r_list);
    nlohmann::json j;
    std::map<double, std::vector<std::pair<double, double>>> counts;  // r -> (logN, logCount)
    for (int N : Ns) {
        auto bundle = fwl::open_baker(N);
        auto ev = fwl::eigenvalues(bundle.M);
        std::string cpath = prefix + "-N" + std::to_string(N) + ".csv";
        std::ofstream f(cpath);
        f << "re,im,abs\n";
        for (int i = 0; i < ev.size(); ++i)
            f << std::setprecision(17) << ev(i).real() << "," << ev(i).imag() << ","
              << std::abs(ev(i)) << "\n";
        for (double r : rs) {
            int c = 0;
            for (int i = 0; i < ev.size(); ++i)
                if (std::abs(ev(i)) >= r) ++c;
            if (c > 0) counts[r].push_back({std::log(N), std::log(c)});
            j["counts"][std::to_string(N)][std::to_string(r)] = c;
        }
    }
    auto fit = [](const std::vector<std::pair<double, double>>& pts) {
        double mx = 0, my = 0;
        for (auto& [x, y] : pts) mx += x, my += y;
        mx /= pts.size();
        my /= pts.size();
        double sxx = 0, sxy = 0;
        for (auto& [x, y] : pts) {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
        }
        return sxx > 0 ? sxy / sxx : 0.0;
    };
    for (auto& [r, pts] : counts) {
        j["slopes"][std::to_string(r)] = fit(pts);
        // the smallest dimension is visibly pre-asymptotic; the tail fit is
        // the better exponent estimate when at least three sizes remain
        if (pts.size() >= 4)
            j["tail_slopes"][std::to_string(r)] =
                fit({pts.begin() + 1, pts.end()});
    }
    j["reference_exponent"] = std::log(2.0) / std::log(3.0);
    std::ofstream(prefix + ".json") << j.dump(2) << "\n";
    auto m = make_manifest("baker-weyl", "", {{"N_list", n_list}, {"r_list", r_list}});
    m.outputs = {prefix + ".json"};
    m.write(prefix + ".manifest.json");
    std::cout << "baker-weyl -> " << prefix << ".json\n";
    return 0;
}

int cmd_grushin(const std::string& out) {
    // synthetic family demo: compare the series effective block with direct
    // bordered inversion and with pencil eigenvalue counting
    const int n = 40, r = 6;
    fwl::RunManifest m = make_manifest("grushin-demo", "", {});
    std::mt19937_64 rng(m.seed());
    std::normal_distribution<double> g;
    auto randm = [&](int rows, int cols, double scale) {
        Eigen::MatrixXcd X(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int k = 0; k < cols; ++k) X(i, k) = scale * fwl::cplx(g(rng), g(rng));
        return X;
    };
    Eigen::MatrixXcd R = Eigen::HouseholderQR<Eigen::MatrixXcd>(randm(n, r, 1.0))
                             .householderQ() *
                         Eigen::MatrixXcd::Identity(n, r);
    Eigen::MatrixXcd A = randm(n, n, 0.08);
    Eigen::MatrixXcd B = randm(n, n, 0.15);
    auto M_of = [&](fwl::cplx z) { return A + z * B; };
    auto gr = fwl::grushin(M_of(0.3), R);
    auto direct = fwl::grushin_direct(M_of(0.3), R);
    double series_vs_direct = (gr.E_mp - direct).norm();
    auto f = [&](fwl::cplx z) {
        return fwl::cplx(fwl::grushin(M_of(z), R).E_mp.determinant());
    };
    double w = fwl::winding_number(f, 0.0, 1.0, 256);
    auto gev = fwl::generalized_eigenvalues(
        Eigen::MatrixXcd::Identity(n, n) - A, B);
    int inside = 0;
    for (int i = 0; i < gev.size(); ++i)
        if (std::isfinite(gev(i).real()) && std::abs(gev(i)) < 1.0) ++inside;
    nlohmann::json j;
    j["series_vs_direct"] = series_vs_direct;
    j["series_terms"] = gr.series_terms_used;
    j["contour_zero_count"] = std::lround(w);
    j["pencil_eigenvalue_count"] = inside;
    j["match"] = (std::lround(w) == inside);
    std::string text = j.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream(out) << text;
        m.outputs = {out};
        m.write(out + ".manifest.json");
        std::cout << "grushin-demo -> " << out << " (match="
                  << (std::lround(w) == inside ? "yes" : "no") << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractal Weyl laboratory for open disc billiards"};
    app.require_subcommand(1);
    int threads = 0;
    double budget = 0;
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_option("--budget", budget, "soft runtime budget in minutes");

    std::string config, out, prefix, method = "both", grid, input, n_list, r_list;
    int max_period = 6, depth = 8, ns = 512, np = 256, m_max = -1, r_steps = 12;
    double epsilon = 1e-2, re_min = 1, re_max = 10, im_min = -1, im_max = 0;
    double alpha = 0.5, r_min = 5, r_max = 50;
    bool symmetry = false;

    auto* c_ik = app.add_subcommand("ikawa-check", "no-eclipse condition check");
    c_ik->add_option("--config", config)->required();

    auto* c_orb = app.add_subcommand("orbits", "periodic orbit catalogue");
    c_orb->add_option("--config", config)->required();
    c_orb->add_option("--max-period", max_period);
    c_orb->add_option("--out", out)->required();

    auto* c_tr = app.add_subcommand("trapped-set", "finite-depth trapped sample");
    c_tr->add_option("--config", config)->required();
    c_tr->add_option("--depth", depth);
    c_tr->add_option("--ns", ns);
    c_tr->add_option("--np", np);
    c_tr->add_option("--out", prefix)->required();

    auto* c_dim = app.add_subcommand("dimension", "trapped-set dimension estimates");
    c_dim->add_option("--config", config)->required();
    c_dim->add_option("--method", method)->check(CLI::IsMember({"box", "pressure", "both"}));
    c_dim->add_option("--max-period", max_period);
    c_dim->add_option("--depth", depth);
    c_dim->add_option("--out", out);

    int escape_K = 0;
    bool escape_verify = false;
    auto* c_esc = app.add_subcommand("escape-fn", "escape-function grids");
    c_esc->add_option("--config", config)->required();
    c_esc->add_option("--epsilon", epsilon);
    c_esc->add_option("--depth", escape_K, "iteration depth of the summed distances");
    c_esc->add_flag("--verify", escape_verify, "run the inequality suite");
    c_esc->add_option("--out", prefix)->required();

    auto* c_res = app.add_subcommand("resonances", "determinant zeros in a k-window");
    c_res->add_option("--config", config)->required();
    c_res->add_option("--re-min", re_min)->required();
    c_res->add_option("--re-max", re_max)->required();
    c_res->add_option("--im-min", im_min)->required();
    c_res->add_option("--im-max", im_max)->required();
    c_res->add_option("--grid", grid);
    c_res->add_option("--m-max", m_max);
    c_res->add_flag("--symmetry", symmetry);
    c_res->add_option("--out", out)->required();

    auto* c_wf = app.add_subcommand("weyl-fit", "resonance counting fits");
    c_wf->add_option("--input", input)->required();
    c_wf->add_option("--alpha", alpha);
    c_wf->add_option("--r-min", r_min);
    c_wf->add_option("--r-max", r_max);
    c_wf->add_option("--r-steps", r_steps);
    c_wf->add_option("--out", out)->required();

    auto* c_bk = app.add_subcommand("baker-weyl", "open-baker eigenvalue scaling");
    c_bk->add_option("--N-list", n_list)->required();
    c_bk->add_option("--r-list", r_list)->required();
    c_bk->add_option("--out", prefix)->required();

    auto* c_gr = app.add_subcommand("grushin-demo", "effective-Hamiltonian checks");
    c_gr->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        if (c_ik->parsed()) return cmd_ikawa(config);
        if (c_orb->parsed()) return cmd_orbits(config, max_period, out);
        if (c_tr->parsed()) return cmd_trapped(config, depth, ns, np, prefix);
        if (c_dim->parsed()) return cmd_dimension(config, method, max_period, depth, out);
        if (c_esc->parsed())
            return cmd_escape(config, epsilon, escape_K, escape_verify, prefix);
        if (c_res->parsed())
            return cmd_resonances(config, re_min, re_max, im_min, im_max, grid,
                                  symmetry, m_max, out);
        if (c_wf->parsed()) return cmd_weyl_fit(input, alpha, r_min, r_max, r_steps, out);
        if (c_bk->parsed()) return cmd_baker(n_list, r_list, prefix);
        if (c_gr->parsed()) return cmd_grushin(out);
    } catch (const fwl::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const fwl::GeometryError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
