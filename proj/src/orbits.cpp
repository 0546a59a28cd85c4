#include "fwl/orbits.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace fwl {

namespace {

std::vector<Vec2> bounce_points(const DiscSystem& sys, const std::vector<int>& word,
                                const std::vector<double>& theta) {
    std::vector<Vec2> x(word.size());
    for (size_t k = 0; k < word.size(); ++k) {
        const Disc& d = sys.disc(word[k]);
        x[k] = d.center + d.radius * Vec2{std::cos(theta[k]), std::sin(theta[k])};
    }
    return x;
}

// Gradient of the total length L(theta) = sum_k |x_{k+1} - x_k|.
Eigen::VectorXd length_gradient(const DiscSystem& sys, const std::vector<int>& word,
                                const std::vector<double>& theta) {
    const int n = static_cast<int>(word.size());
    auto x = bounce_points(sys, word, theta);
    Eigen::VectorXd g(n);
    for (int k = 0; k < n; ++k) {
        int prev = (k + n - 1) % n, next = (k + 1) % n;
        Vec2 u_in = normalized(x[k] - x[prev]);
        Vec2 u_out = normalized(x[next] - x[k]);
        Vec2 tau{-std::sin(theta[k]), std::cos(theta[k])};
        g(k) = sys.disc(word[k]).radius * dot(tau, u_in - u_out);
    }
    return g;
}

}  // namespace

bool is_reduced(const std::vector<int>& word) {
    const int n = static_cast<int>(word.size());
    if (n == 0) return false;
    if (n == 1) return false;  // a single bounce cannot close up
    for (int k = 0; k < n; ++k)
        if (word[k] == word[(k + 1) % n]) return false;
    return true;
}

PeriodicOrbit find_periodic_orbit(const DiscSystem& sys, const std::vector<int>& word) {
    PeriodicOrbit orb;
    orb.word = word;
    const int n = static_cast<int>(word.size());
    if (!is_reduced(word)) return orb;

    // Seed: aim each bounce angle at the midpoint of the neighboring centers,
    // then relax a few sweeps before Newton.
    std::vector<double> theta(n);
    for (int k = 0; k < n; ++k) {
        int prev = (k + n - 1) % n, next = (k + 1) % n;
        Vec2 m = 0.5 * (sys.disc(word[prev]).center + sys.disc(word[next]).center);
        Vec2 w = m - sys.disc(word[k]).center;
        theta[k] = std::atan2(w.y, w.x);
    }
    for (int sweep = 0; sweep < 30; ++sweep) {
        auto x = bounce_points(sys, word, theta);
        for (int k = 0; k < n; ++k) {
            int prev = (k + n - 1) % n, next = (k + 1) % n;
            Vec2 m = 0.5 * (x[prev] + x[next]);
            Vec2 w = m - sys.disc(word[k]).center;
            theta[k] = std::atan2(w.y, w.x);
        }
    }

    const double h = 1e-7;
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
        Eigen::VectorXd g = length_gradient(sys, word, theta);
        if (g.lpNorm<Eigen::Infinity>() < 1e-13) {
            ok = true;
            break;
        }
        Eigen::MatrixXd H(n, n);
        for (int c = 0; c < n; ++c) {
            auto tp = theta, tm = theta;
            tp[c] += h;
            tm[c] -= h;
            H.col(c) = (length_gradient(sys, word, tp) - length_gradient(sys, word, tm)) /
                       (2 * h);
        }
        Eigen::VectorXd d = H.fullPivLu().solve(g);
        for (int k = 0; k < n; ++k) theta[k] -= d(k);
    }
    orb.converged = ok;
    if (!ok) return orb;

    auto x = bounce_points(sys, word, theta);
    orb.points.resize(n);
    orb.length = 0.0;
    for (int k = 0; k < n; ++k) {
        int next = (k + 1) % n;
        Vec2 u_out = normalized(x[next] - x[k]);
        Vec2 tau{-std::sin(theta[k]), std::cos(theta[k])};
        double s = theta[k];
        s = std::fmod(s, 2.0 * M_PI);
        if (s < 0) s += 2.0 * M_PI;
        orb.points[k] = {word[k], s, dot(tau, u_out)};
        orb.length += norm(x[next] - x[k]);
    }

    // Verify the itinerary is realized by the dynamics and accumulate the
    // monodromy along the way.
    Mat2 M{{{1, 0}, {0, 1}}};
    orb.realized = true;
    for (int k = 0; k < n; ++k) {
        StepResult sr = step(sys, orb.points[k]);
        if (sr.kind != StepKind::Forward || sr.next->disc != word[(k + 1) % n]) {
            orb.realized = false;
            break;
        }
        Mat2 J = jacobian(sys, orb.points[k]);
        Mat2 P;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                P[r][c] = J[r][0] * M[0][c] + J[r][1] * M[1][c];
        M = P;
    }
    orb.monodromy = M;
    if (orb.realized) {
        double tr = M[0][0] + M[1][1];
        double det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
        double disc = tr * tr / 4.0 - det;
        if (disc > 0) {
            double r1 = tr / 2.0 + std::copysign(std::sqrt(disc), tr);
            orb.lambda = std::max(std::abs(r1), std::abs(det / r1));
        } else {
            orb.lambda = std::sqrt(std::abs(det));
        }
    }
    return orb;
}

std::vector<std::vector<int>> prime_words(int J, int max_period) {
    std::vector<std::vector<int>> out;
    auto canonical = [](const std::vector<int>& w) {
        auto best = w;
        auto rot = w;
        for (size_t k = 1; k < w.size(); ++k) {
            std::rotate(rot.begin(), rot.begin() + 1, rot.end());
            if (rot < best) best = rot;
        }
        return best;
    };
    auto is_prime = [](const std::vector<int>& w) {
        const int n = static_cast<int>(w.size());
        for (int d = 1; d < n; ++d) {
            if (n % d != 0) continue;
            bool rep = true;
            for (int k = 0; k < n && rep; ++k)
                if (w[k] != w[k % d]) rep = false;
            if (rep) return false;
        }
        return true;
    };
    for (int n = 2; n <= max_period; ++n) {
        std::vector<int> w(n, 0);
        std::vector<std::vector<int>> seen;
        while (true) {
            if (is_reduced(w) && is_prime(w)) {
                auto c = canonical(w);
                if (c == w) out.push_back(w);
            }
            int k = n - 1;
            while (k >= 0 && w[k] == J - 1) w[k--] = 0;
            if (k < 0) break;
            ++w[k];
        }
    }
    return out;
}

std::vector<PeriodicOrbit> all_orbits(const DiscSystem& sys, int max_period) {
    std::vector<PeriodicOrbit> out;
    for (const auto& w : prime_words(sys.count(), max_period)) {
        PeriodicOrbit orb = find_periodic_orbit(sys, w);
        if (orb.converged && orb.realized) out.push_back(std::move(orb));
    }
    return out;
}

}  // namespace fwl
