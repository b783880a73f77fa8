#pragma once

#include <cstdint>

namespace rlr {

/// splitmix64 step; also used to derive child seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Mixes a parent seed with a stream key into a new seed.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key);

/// xoshiro256** generator with portable samplers.
///
/// All samplers use only integer arithmetic plus std::log / std::sqrt /
/// std::pow, so streams are reproducible across platforms:
///   normal   - Marsaglia polar method (the spare variate is cached)
///   gamma    - Marsaglia-Tsang squeeze; shape < 1 via the U^(1/a) boost
///   chi2     - sum of squared normals for integer nu, 2 * gamma(nu/2) otherwise
///   student  - normal / sqrt(chi2 / nu)
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);
    double normal();
    double gamma(double shape);
    double chi2(double nu);
    double student_t(double nu);

private:
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace rlr
