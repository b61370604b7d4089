#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <string_view>

namespace cldp {

/// Stable 64-bit mixing function (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Hash of a label, stable across platforms (FNV-1a, 64 bit).
std::uint64_t label_hash(std::string_view label);

/// Derives a child seed from a parent seed and a sequence of integer tags.
/// Used for all stream splitting: replication i of stratum m gets
/// derive_seed(root, {label_hash("stratum"), m, i}).
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> tags);

/// Random stream. mt19937_64 output is fixed by the standard, and every
/// variate below is produced from it by explicit arithmetic, so sequences are
/// identical across compilers and platforms.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Poisson(mean) by inversion; consumes exactly one uniform.
    std::uint64_t poisson(double mean);

    std::uint64_t seed() const { return seed_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

/// Inverse CDF of Poisson(mean) at u: the smallest k with P(N <= k) >= u.
std::uint64_t poisson_quantile(double mean, double u);

}  // namespace cldp
