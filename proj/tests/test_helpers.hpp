#pragma once

#include "gencal/gen_model.hpp"
#include "gencal/params.hpp"

#include <random>

namespace gencal::testing {

inline GeneratorParams params() { return desk_machine_params(); }

/// Loaded operating point of the default machine (P = 0.9 at |V| = 1).
inline OperatingPoint loaded_point(double p_e = 0.9) {
    const Complex v = std::polar(1.0, 0.2);
    const Complex i = std::polar(p_e / 0.98, 0.2 - std::acos(0.98));
    return equilibrium_solve(v, i, params());
}

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(12345);
    return g;
}

inline double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

}  // namespace gencal::testing
