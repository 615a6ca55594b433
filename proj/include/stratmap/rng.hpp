#pragma once

#include <cstdint>
#include <random>

namespace stratmap {

/// Deterministic random stream: the same seed yields the same draw sequence
/// on every platform. std::mt19937_64 output is fully specified by the
/// standard; the helpers below derive doubles and bounded integers from raw
/// 64-bit words directly instead of going through the (implementation
/// defined) std:: distributions.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform();

    /// Uniform integer in [0, n). n must be > 0. Unbiased via rejection.
    std::size_t uniform_index(std::size_t n);

    /// Standard normal draw via inverse-CDF (one uniform per draw).
    double normal();

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// SplitMix-style mixer for deriving sub-stream seeds, e.g. one stream per
/// (run seed, episode) pair.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Inverse of the standard normal CDF (Acklam's rational approximation,
/// |relative error| < 1.2e-9). Exposed for tests.
double inverse_normal_cdf(double p);

}  // namespace stratmap
