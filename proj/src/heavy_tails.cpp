#include "cldp/heavy_tails.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cldp {

std::string_view to_string(Family f) {
    switch (f) {
        case Family::pareto: return "pareto";
        case Family::exponential: return "exponential";
        case Family::deterministic: return "deterministic";
    }
    return "?";
}

Family parse_family(std::string_view s) {
    if (s == "pareto") return Family::pareto;
    if (s == "exponential") return Family::exponential;
    if (s == "deterministic") return Family::deterministic;
    throw ConfigError("family: unknown law family '" + std::string(s) + "'");
}

std::string_view to_string(Dependence d) {
    switch (d) {
        case Dependence::independent_light_k: return "independent_light_k";
        case Dependence::comonotone: return "comonotone";
        case Dependence::heavy_k_light_x: return "heavy_k_light_x";
    }
    return "?";
}

Dependence parse_dependence(std::string_view s) {
    if (s == "independent_light_k") return Dependence::independent_light_k;
    if (s == "comonotone") return Dependence::comonotone;
    if (s == "heavy_k_light_x") return Dependence::heavy_k_light_x;
    throw ConfigError("dependence: unknown dependence '" + std::string(s) + "'");
}

void TailLaw::validate() const {
    switch (family) {
        case Family::pareto:
            if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha: pareto law requires alpha > 0");
            if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("scale: pareto law requires scale > 0");
            break;
        case Family::exponential:
            if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("scale: exponential law requires scale > 0");
            break;
        case Family::deterministic:
            if (!(scale >= 0.0) || !std::isfinite(scale)) throw ConfigError("scale: deterministic value must be >= 0");
            break;
    }
}

double quantile(const TailLaw& law, double u) {
    if (!(u >= 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in [0,1)");
    switch (law.family) {
        case Family::pareto: return law.scale * std::pow(1.0 - u, -1.0 / law.alpha);
        case Family::exponential: return -law.scale * std::log1p(-u);
        case Family::deterministic: return law.scale;
    }
    return 0.0;
}

double tail_prob(const TailLaw& law, double x) {
    switch (law.family) {
        case Family::pareto:
            if (x <= law.scale) return 1.0;
            return std::pow(x / law.scale, -law.alpha);
        case Family::exponential:
            if (x <= 0.0) return 1.0;
            return std::exp(-x / law.scale);
        case Family::deterministic: return x < law.scale ? 1.0 : 0.0;
    }
    return 0.0;
}

double mean(const TailLaw& law) {
    switch (law.family) {
        case Family::pareto:
            if (law.alpha <= 1.0) return std::numeric_limits<double>::infinity();
            return law.alpha * law.scale / (law.alpha - 1.0);
        case Family::exponential:
        case Family::deterministic: return law.scale;
    }
    return 0.0;
}

double sample(const TailLaw& law, Stream& rng) { return quantile(law, rng.uniform()); }

namespace {

// sum_{k >= n} k^-a for a > 1, n >= 1, by direct summation plus an
// Euler-Maclaurin tail.
double zeta_tail(double a, std::uint64_t n) {
    constexpr std::uint64_t kDirect = 20000;
    double sum = 0.0;
    const std::uint64_t stop = n + kDirect;
    for (std::uint64_t k = n; k < stop; ++k) sum += std::pow(static_cast<double>(k), -a);
    const double N = static_cast<double>(stop);
    const double f = std::pow(N, -a);
    const double integral = std::pow(N, 1.0 - a) / (a - 1.0);
    const double d1 = -a * f / N;
    const double d3 = -a * (a + 1.0) * (a + 2.0) * f / (N * N * N);
    return sum + integral + 0.5 * f - d1 / 12.0 + d3 / 720.0;
}

}  // namespace

double mean_ceil_scaled(const TailLaw& law, double c) {
    if (c == 0.0) return 0.0;
    switch (law.family) {
        case Family::deterministic: return std::ceil(c * law.scale);
        case Family::exponential: {
            // sum_{k>=0} exp(-k / (c * mean)).
            return 1.0 / (-std::expm1(-1.0 / (c * law.scale)));
        }
        case Family::pareto: {
            if (law.alpha <= 1.0) return std::numeric_limits<double>::infinity();
            // sum_{k>=0} P(cY > k): terms equal 1 while k < c*scale.
            const double a = c * law.scale;
            const auto k0 = static_cast<std::uint64_t>(std::ceil(a));
            return static_cast<double>(k0) + std::pow(a, law.alpha) * zeta_tail(law.alpha, k0);
        }
    }
    return 0.0;
}

void JointMarkSpec::validate() const {
    x_law.validate();
    if (!std::isfinite(mean(x_law))) throw ConfigError("alpha: mark law must have a finite mean (alpha > 1)");
    if (!(k_param >= 0.0) || !std::isfinite(k_param)) throw ConfigError("k_param: must be finite and >= 0");
    if (dependence == Dependence::heavy_k_light_x && !(k_alpha > 1.0)) {
        throw ConfigError("k_alpha: heavy offspring law requires k_alpha > 1");
    }
    if (!(phi >= 0.0) || !std::isfinite(phi)) throw ConfigError("phi: must be finite and >= 0");
    if (phi > 0.0 && !(mean_fertility() < 1.0)) {
        throw ConfigError("phi: Hawkes spec is not subcritical (phi * E[X] = " +
                          std::to_string(mean_fertility()) + " >= 1)");
    }
}

double JointMarkSpec::mean_fertility() const { return phi * mean(x_law); }

double JointMarkSpec::mean_offspring() const {
    switch (dependence) {
        case Dependence::independent_light_k: return k_param;
        case Dependence::comonotone: return mean_ceil_scaled(x_law, k_param);
        case Dependence::heavy_k_light_x: return mean_ceil_scaled(TailLaw::pareto(k_alpha, 1.0), k_param);
    }
    return 0.0;
}

std::uint64_t offspring_count(const JointMarkSpec& spec, double x, Stream& rng) {
    switch (spec.dependence) {
        case Dependence::independent_light_k: return rng.poisson(spec.k_param);
        case Dependence::comonotone: return static_cast<std::uint64_t>(std::ceil(spec.k_param * x));
        case Dependence::heavy_k_light_x: {
            const double y = quantile(TailLaw::pareto(spec.k_alpha, 1.0), rng.uniform());
            return static_cast<std::uint64_t>(std::ceil(spec.k_param * y));
        }
    }
    return 0;
}

JointDraw sample_joint(const JointMarkSpec& spec, Stream& rng) {
    JointDraw d;
    d.x = sample(spec.x_law, rng);
    d.k = offspring_count(spec, d.x, rng);
    d.kappa = spec.phi * d.x;
    return d;
}

void WaitLaw::validate() const {
    try {
        law.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("wait_" + std::string(e.what()));
    }
    if (conditional_on_mark && law.family != Family::exponential) {
        throw ConfigError("wait_conditional: mark-conditional waiting times require the exponential family");
    }
    if (!allow_infinite_mean && !std::isfinite(mean(law))) {
        throw ConfigError("wait_alpha: waiting-time law must have finite mean (set allow_infinite_wait=1 to override)");
    }
}

TailLaw WaitLaw::given_mark(double parent_mark) const {
    if (!conditional_on_mark) return law;
    return TailLaw::exponential(law.scale / (1.0 + parent_mark));
}

double WaitLaw::sample(double parent_mark, Stream& rng) const {
    return quantile(given_mark(parent_mark), rng.uniform());
}

std::vector<double> empirical_tail_ratio(std::span<const double> samples, const TailLaw& ref,
                                         std::span<const double> x_grid) {
    if (samples.empty()) throw std::invalid_argument("empirical_tail_ratio: empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    std::vector<double> out;
    out.reserve(x_grid.size());
    for (double x : x_grid) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
        out.push_back((static_cast<double>(above) / n) / tail_prob(ref, x));
    }
    return out;
}

}  // namespace cldp
