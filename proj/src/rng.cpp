#include "cldp/rng.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace cldp {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t label_hash(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = mix64(parent);
    for (std::uint64_t t : tags) {
        s = mix64(s ^ mix64(t + 0x632be59bd9b4e019ULL));
    }
    return s;
}

std::uint64_t poisson_quantile(double mean, double u) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw std::domain_error("poisson_quantile: mean must be finite and >= 0");
    }
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
        // Sequential search from zero.
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (cdf < u) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
            if (p == 0.0 && cdf < u) break;  // u is within rounding of 1
        }
        return k;
    }
    // Start at the mode and walk; the number of steps is O(sqrt(mean)).
    auto k = static_cast<std::uint64_t>(std::floor(mean));
    double cdf = boost::math::gamma_q(static_cast<double>(k) + 1.0, mean);
    double pmf = std::exp(static_cast<double>(k) * std::log(mean) - mean -
                          std::lgamma(static_cast<double>(k) + 1.0));
    if (u <= cdf) {
        while (k > 0 && cdf - pmf >= u) {
            cdf -= pmf;
            pmf *= static_cast<double>(k) / mean;
            --k;
        }
        return k;
    }
    while (cdf < u) {
        ++k;
        pmf *= mean / static_cast<double>(k);
        if (pmf == 0.0) break;
        cdf += pmf;
    }
    return k;
}

std::uint64_t Stream::poisson(double mean) { return poisson_quantile(mean, uniform()); }

}  // namespace cldp
