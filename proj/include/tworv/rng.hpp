#ifndef TWORV_RNG_HPP
#define TWORV_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace tworv {

/// Seeded PRNG with fixed variate transforms. The transforms are written out
/// here (rather than using std::*_distribution) so that a given seed produces
/// the same stream on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 42) : engine_(seed) {}

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        return double(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1], safe as a log argument.
    double uniform_positive() {
        return double((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; second variate cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_positive();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Exponential with the given rate.
    double exponential(double rate) {
        return -std::log(uniform_positive()) / rate;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace tworv

#endif
