#include "fwl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fwl {

DiscSystem::DiscSystem(std::vector<Disc> discs) : discs_(std::move(discs)) {
    if (discs_.empty())
        throw GeometryError("disc system must contain at least one disc");
    for (size_t i = 0; i < discs_.size(); ++i) {
        if (!(discs_[i].radius > 0.0))
            throw GeometryError("disc " + std::to_string(i) + " has non-positive radius");
    }
    for (size_t i = 0; i < discs_.size(); ++i) {
        for (size_t j = i + 1; j < discs_.size(); ++j) {
            double d = norm(discs_[i].center - discs_[j].center);
            double rr = discs_[i].radius + discs_[j].radius;
            if (!(d > rr)) {
                std::ostringstream os;
                os << "discs " << i << " and " << j << " overlap: center distance "
                   << d << " <= " << rr;
                throw GeometryError(os.str());
            }
        }
    }
}

double DiscSystem::max_radius() const {
    double m = 0.0;
    for (const auto& d : discs_) m = std::max(m, d.radius);
    return m;
}

namespace {

std::vector<double> parse_numbers(const std::string& s, int line_no, size_t expected) {
    std::istringstream is(s);
    std::vector<double> out;
    double v;
    while (is >> v) out.push_back(v);
    if (out.size() != expected) {
        std::ostringstream os;
        os << "line " << line_no << ": expected " << expected << " numbers, got "
           << out.size();
        throw ConfigError(os.str());
    }
    return out;
}

}  // namespace

DiscSystem load_system(const std::string& config_text) {
    std::istringstream in(config_text);
    std::vector<Disc> discs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        // strip whitespace
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);

        std::string key, rest;
        auto eq = line.find('=');
        if (eq != std::string::npos) {
            key = line.substr(0, eq);
            rest = line.substr(eq + 1);
        } else {
            std::istringstream ls(line);
            ls >> key;
            std::getline(ls, rest);
        }
        auto ke = key.find_last_not_of(" \t");
        key = key.substr(0, ke == std::string::npos ? 0 : ke + 1);

        if (key == "disc") {
            auto v = parse_numbers(rest, line_no, 3);
            discs.push_back({{v[0], v[1]}, v[2]});
        } else if (key == "equilateral") {
            auto v = parse_numbers(rest, line_no, 2);
            double D = v[0], a = v[1];
            // centers on an equilateral triangle of side D, centroid at origin
            double R = D / std::sqrt(3.0);
            for (int j = 0; j < 3; ++j) {
                double th = M_PI / 2.0 + 2.0 * M_PI * j / 3.0;
                discs.push_back({{R * std::cos(th), R * std::sin(th)}, a});
            }
        } else if (key == "two_discs") {
            auto v = parse_numbers(rest, line_no, 2);
            double D = v[0], a = v[1];
            discs.push_back({{0.0, 0.0}, a});
            discs.push_back({{D, 0.0}, a});
        } else {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                              key + "'");
        }
    }
    if (discs.empty()) throw ConfigError("no discs declared in configuration");
    return DiscSystem(std::move(discs));
}

DiscSystem load_system_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return load_system(os.str());
}

double point_to_two_disc_hull(const Vec2& q, const Disc& a, const Disc& b) {
    // The hull is the union of the interpolated discs
    //   D(t) = disc((1-t) c_a + t c_b, (1-t) r_a + t r_b), t in [0,1],
    // so the (signed when outside) distance is min_t |q - c(t)| - r(t),
    // a convex function of t. Golden-section to machine precision.
    auto f = [&](double t) {
        Vec2 c = (1.0 - t) * a.center + t * b.center;
        double r = (1.0 - t) * a.radius + t * b.radius;
        return norm(q - c) - r;
    };
    double lo = 0.0, hi = 1.0;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 120 && hi - lo > 1e-15; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - invphi * (hi - lo); f1 = f(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + invphi * (hi - lo); f2 = f(x2);
        }
    }
    return std::min({f(lo), f1, f2, f(hi)});
}

IkawaReport check_ikawa(const DiscSystem& sys) {
    IkawaReport rep;
    int J = sys.count();
    for (int k = 0; k < J; ++k) {
        for (int j = 0; j < J; ++j) {
            for (int l = j + 1; l < J; ++l) {
                if (j == k || l == k) continue;
                double d = point_to_two_disc_hull(sys.disc(k).center, sys.disc(j),
                                                  sys.disc(l));
                d -= sys.disc(k).radius;
                if (d <= 0.0) rep.violations.push_back({k, j, l, d});
            }
        }
    }
    rep.satisfied = rep.violations.empty();
    return rep;
}

}  // namespace fwl
