#pragma once

#include <cstdint>
#include <memory>
#include <random>

#include "degwave/spaces.hpp"
#include "degwave/wavesolver.hpp"

namespace degwave {

/// Seeded generator producing reproducible doubles. The engine output is
/// standardized, and the mapping below avoids std::distributions, whose
/// bit streams vary across library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [-1, 1).
    double symmetric() { return 2.0 * uniform() - 1.0; }

private:
    std::mt19937_64 eng_;
};

/// Band-limited random data: the lowest `n_modes` Dirichlet eigenmodes of
/// the non-degenerate reference operator with coefficients drawn from rng,
/// one draw per mode for the displacement and one for the velocity.
inline StatePair band_limited_pair(std::shared_ptr<const Grid> grid, int n_modes,
                                   Rng& rng) {
    StatePair q = zero_state(grid);
    const auto modes = lowest_modes(grid->domain(), n_modes);
    for (const auto& m : modes) {
        const ScalarField f = mode_field(grid, m);
        const double cu = rng.symmetric();
        const double cv = rng.symmetric();
        axpy(q.u, cu, f);
        axpy(q.v, cv, f);
    }
    return q;
}

}  // namespace degwave
