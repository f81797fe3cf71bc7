#pragma once

#include <bdpp/hypgeom.hpp>
#include <bdpp/rng.hpp>

namespace testutil {

// Uniform-in-the-ball point (Euclidean), radius capped at rmax.
inline bdpp::Point random_point(bdpp::PhiloxRng& rng, int d, double rmax = 0.95) {
    for (;;) {
        std::vector<bdpp::cplx> c(d);
        double n2 = 0.0;
        for (int i = 0; i < d; ++i) {
            c[i] = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
            n2 += std::norm(c[i]);
        }
        if (n2 < rmax * rmax) return bdpp::Point(std::move(c));
    }
}

}  // namespace testutil
