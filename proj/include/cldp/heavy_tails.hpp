#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cldp/rng.hpp"

namespace cldp {

/// Raised for invalid law / spec / experiment parameters. The message names
/// the offending parameter.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Family { pareto, exponential, deterministic };

std::string_view to_string(Family f);
Family parse_family(std::string_view s);

/// One-dimensional law with analytic tail and quantile.
///
/// pareto:        P(X > x) = (x/scale)^-alpha for x >= scale, 1 below.
/// exponential:   P(X > x) = exp(-x/scale) for x >= 0 (scale is the mean).
/// deterministic: X == scale.
struct TailLaw {
    Family family = Family::pareto;
    double alpha = 1.5;
    double scale = 1.0;

    static TailLaw pareto(double alpha, double scale) { return {Family::pareto, alpha, scale}; }
    static TailLaw exponential(double mean) { return {Family::exponential, 0.0, mean}; }
    static TailLaw deterministic(double value) { return {Family::deterministic, 0.0, value}; }

    /// Throws ConfigError when the parameters are out of range.
    void validate() const;
    bool heavy() const { return family == Family::pareto; }

    friend bool operator==(const TailLaw&, const TailLaw&) = default;
};

/// inf{x : CDF(x) >= u}; u in [0,1).
double quantile(const TailLaw& law, double u);
/// Exact P(X > x); total on the reals.
double tail_prob(const TailLaw& law, double x);
/// E[X]; +inf for pareto with alpha <= 1.
double mean(const TailLaw& law);
/// Inverse-CDF draw; consumes exactly one uniform.
double sample(const TailLaw& law, Stream& rng);

enum class Dependence { independent_light_k, comonotone, heavy_k_light_x };

std::string_view to_string(Dependence d);
Dependence parse_dependence(std::string_view s);

/// Joint law of (mark X, offspring count K, fertility kappa) attached to a
/// cluster root. X ~ x_law; kappa = phi * X drives Hawkes offspring counts.
///
/// independent_light_k: K ~ Poisson(k_param), independent of X.
/// comonotone:          K = ceil(k_param * X).
/// heavy_k_light_x:     K = ceil(k_param * Y), Y ~ Pareto(k_alpha, 1) independent of X.
struct JointMarkSpec {
    TailLaw x_law = TailLaw::pareto(1.5, 1.0);
    Dependence dependence = Dependence::independent_light_k;
    double k_param = 0.0;
    double k_alpha = 1.5;
    double phi = 0.0;

    /// Generic checks (finite E[X], k_param >= 0, phi >= 0, phi*E[X] < 1).
    void validate() const;
    /// E[kappa] = phi * E[X].
    double mean_fertility() const;
    /// E[K] for the mixed Binomial offspring count.
    double mean_offspring() const;

    friend bool operator==(const JointMarkSpec&, const JointMarkSpec&) = default;
};

struct JointDraw {
    double x = 0.0;
    std::uint64_t k = 0;
    double kappa = 0.0;
};

/// Mixed Binomial offspring count given the root mark x.
std::uint64_t offspring_count(const JointMarkSpec& spec, double x, Stream& rng);
/// Draws X from x_law, then K given X; kappa = phi * X.
JointDraw sample_joint(const JointMarkSpec& spec, Stream& rng);

/// Offspring waiting-time law. With conditional_on_mark the law must be
/// exponential and its mean becomes scale / (1 + X) for parent mark X.
struct WaitLaw {
    TailLaw law = TailLaw::exponential(1.0);
    bool conditional_on_mark = false;
    /// Admits Pareto waiting times with alpha <= 1 (infinite mean). Only the
    /// Assumption-6 violation experiments set this.
    bool allow_infinite_mean = false;

    void validate() const;
    /// Waiting-time law for a given parent mark.
    TailLaw given_mark(double parent_mark) const;
    double sample(double parent_mark, Stream& rng) const;

    friend bool operator==(const WaitLaw&, const WaitLaw&) = default;
};

/// For each x in x_grid: (fraction of samples > x) / tail_prob(ref, x).
std::vector<double> empirical_tail_ratio(std::span<const double> samples, const TailLaw& ref,
                                         std::span<const double> x_grid);

/// E[ceil(c * Y)] for Y ~ law (pareto or deterministic or exponential).
double mean_ceil_scaled(const TailLaw& law, double c);

}  // namespace cldp
