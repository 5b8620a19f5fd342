#include "uqp/rng.hpp"

#include <cmath>

namespace uqp {

namespace {

// splitmix64: well-mixed 64-bit permutation used both for stream stepping
// and seed derivation.
std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
    // Top 53 bits give a uniform dyadic rational in [0, 1).
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller on (0, 1] x [0, 1).
    double u1 = 0.0;
    do {
        u1 = 1.0 - uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

Complex Rng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im);
}

double Rng::angle() { return uniform() * kTwoPi; }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed ^ (0xD6E8FEB86659FD93ULL * (salt + 1));
    std::uint64_t mixed = splitmix64(x);
    return mixed;
}

PhaseVector random_phases(int n, Rng& rng) {
    std::vector<double> p(static_cast<size_t>(n));
    for (double& x : p) x = rng.angle();
    return PhaseVector(std::move(p));
}

}  // namespace uqp
