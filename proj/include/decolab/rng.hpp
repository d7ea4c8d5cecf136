// rng.hpp — Seedable, portable normal sampler for reproducible coupling draws

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace decolab {

// Standard-normal stream built on std::mt19937_64 (whose output sequence is
// fixed by the standard) and a basic Box-Muller transform so that identical
// seeds give bit-identical draws on every platform. std::normal_distribution
// is implementation-defined and must not be used here.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // uniforms in (0,1]; u1 > 0 keeps the log finite
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_{0.0};
    bool have_spare_{false};
};

} // namespace decolab
