#pragma once
#include <vector>

#include "fwl/billiard.hpp"

namespace fwl {

/// A periodic billiard trajectory with itinerary `word` (disc indices, no two
/// consecutive equal, cyclically). `lambda` is the modulus of the expanding
/// eigenvalue of the period map; `length` the total geometric length.
struct PeriodicOrbit {
    std::vector<int> word;
    std::vector<PhasePoint> points;  // one per bounce, same order as word
    double length = 0.0;
    double lambda = 0.0;
    Mat2 monodromy{};
    bool converged = false;
    bool realized = false;  // every step hits the prescribed next disc
};

/// Locate the periodic orbit with the given itinerary by Newton iteration on
/// the gradient of the length functional over bounce angles. For systems
/// satisfying the no-eclipse condition every reduced word is realized.
PeriodicOrbit find_periodic_orbit(const DiscSystem& sys, const std::vector<int>& word);

/// True if the word is cyclically reduced (w_k != w_{k+1}, including the wrap).
bool is_reduced(const std::vector<int>& word);

/// All prime reduced words over {0..J-1} with period in [1, max_period], one
/// representative (lexicographically least rotation) per cyclic class.
std::vector<std::vector<int>> prime_words(int J, int max_period);

/// Convenience: find all prime periodic orbits up to max_period, dropping any
/// that fail to converge or to realize their itinerary.
std::vector<PeriodicOrbit> all_orbits(const DiscSystem& sys, int max_period);

}  // namespace fwl
