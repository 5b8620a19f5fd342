#pragma once

#include <cstdint>

#include "uqp/types.hpp"

namespace uqp {

/// Deterministic random stream. Uniform doubles come straight from the
/// 64-bit engine and normals through an explicit Box-Muller transform, so a
/// seed reproduces the identical sequence on every platform and toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Uniform in [0, 1).
    double uniform();

    /// Standard normal.
    double normal();

    /// Standard complex normal: independent standard-normal real and
    /// imaginary parts.
    Complex complex_normal();

    /// Uniform in [0, 2*pi).
    double angle();

    std::uint64_t next_u64();

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Mix a seed with a salt (scenario, trial or restart index) into an
/// independent stream seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// Uniform random phase vector of length n.
PhaseVector random_phases(int n, Rng& rng);

}  // namespace uqp
