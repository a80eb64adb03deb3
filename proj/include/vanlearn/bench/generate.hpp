#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "vanlearn/dataset.hpp"
#include "vanlearn/error.hpp"

namespace vanlearn::bench {

// Columns x, y with x ~ U[0, 10) and y = 2x + 1 + N(0, noise_sd). Fully
// determined by the seed (given the same standard library).
inline Dataset generate_linear_data(std::size_t n, double noise_sd, std::uint64_t seed) {
    if (n < 2) throw Error(errc::argument, "generate_linear_data needs n >= 2");
    if (!std::isfinite(noise_sd) || noise_sd < 0.0) throw Error(errc::argument, "noise_sd must be finite and >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, 10.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    Dataset d{{"x", "y"}, {}};
    d.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = ux(rng);
        if (x >= 10.0) x = std::nextafter(10.0, 0.0);  // libstdc++ can round up to the bound
        const double e = noise(rng);
        d.rows.push_back({x, 2.0 * x + 1.0 + noise_sd * e});
    }
    return d;
}

}  // namespace vanlearn::bench
