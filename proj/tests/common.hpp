#pragma once

#include <cmath>
#include <random>

#include "miuralab/grid.hpp"

namespace testutil {

// Random real trigonometric polynomial with modes 1..max_mode (plus a mean),
// amplitudes decaying like 1/(1+m)^decay.
inline miuralab::Field random_bandlimited(const miuralab::Grid& g, int max_mode, std::mt19937_64& rng,
                                          double decay = 0.0, double scale = 1.0) {
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<double> a(max_mode + 1), b(max_mode + 1);
    for (int m = 0; m <= max_mode; ++m) {
        double amp = scale / std::pow(1.0 + m, decay);
        a[m] = amp * n01(rng);
        b[m] = amp * n01(rng);
    }
    return miuralab::Field::sample(g, [&](double x) {
        double s = a[0];
        for (int m = 1; m <= max_mode; ++m) {
            double k = M_PI * m / g.L;
            s += a[m] * std::cos(k * x) + b[m] * std::sin(k * x);
        }
        return s;
    });
}

// Smooth localized random field: random polynomial in x times a gaussian.
inline miuralab::Field random_localized(const miuralab::Grid& g, std::mt19937_64& rng, double amplitude,
                                        double width = 1.5, double center_spread = 1.0) {
    std::normal_distribution<double> n01(0.0, 1.0);
    double c0 = n01(rng), c1 = n01(rng), c2 = n01(rng), x0 = center_spread * n01(rng);
    return miuralab::Field::sample(g, [&](double x) {
        double z = (x - x0) / width;
        return amplitude * (c0 + c1 * z + c2 * (z * z - 1.0)) * std::exp(-0.5 * z * z);
    });
}

}  // namespace testutil
