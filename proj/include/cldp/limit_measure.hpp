#pragma once

#include <cstddef>
#include <string_view>

#include "cldp/heavy_tails.hpp"
#include "cldp/path_event.hpp"

namespace cldp {

enum class LimitModel { mb_independent, mb_comonotone, mb_heavy_k, hawkes_comonotone };

std::string_view to_string(LimitModel m);

/// One-dimensional limit measure mu((y, inf)) = constant * y^-alpha, relative
/// to v(x) = 1 / P(X > x) for the mark law. Integrals over products of mu
/// (k >= 1) restrict mu to [y0, inf), where it has finite mass C * y0^-alpha.
struct LimitMeasure {
    LimitModel model = LimitModel::mb_independent;
    double alpha = 1.5;
    double constant = 1.0;
    double y0 = 1.0;

    /// Total mass of the truncated measure on [y0, inf).
    double truncated_mass() const;
};

/// Limit measure of the cluster mass D for a mixed Binomial (hawkes = false)
/// or Hawkes (hawkes = true) model. Requires a Pareto mark law. The constants:
///   mb independent K:   1 + E[K]
///   mb comonotone:      (1 + eta E[X])^alpha + E[ceil(eta X)]
///   mb heavy K:         1 + E[K] + (k_param E[X] / scale)^alpha when k_alpha == alpha,
///                       1 + E[K] when k_alpha > alpha
///   hawkes:             (1/(1-m)) (1 + phi E[X] / (1-m))^alpha, m = phi E[X]
/// Throws ConfigError when the cluster mass is not regularly varying with the
/// mark index (heavy K with k_alpha < alpha, light marks).
LimitMeasure limit_measure_for(const JointMarkSpec& spec, bool hawkes);

/// mu((y, inf)); throws std::domain_error when y <= 0.
double mu_tail(const LimitMeasure& m, double y);

struct MeasureValue {
    double value = 0.0;
    double error = 0.0;  ///< standard error for the quasi-random route, 0 otherwise
};

/// (lambda^{k+1} / (k+1)!) * mu^{k+1}(y_1 + ... + y_{k+1} > c).
/// k = 0 is exact and untruncated; k = 1, 2 use nested Gauss-Legendre; k >= 3
/// uses randomized Halton points.
MeasureValue mu_bar_tail_detailed(const LimitMeasure& m, double lambda, std::size_t k, double c);
double mu_bar_tail(const LimitMeasure& m, double lambda, std::size_t k, double c);

/// Path-space limit value of an event at order k.
double mu_sharp(const LimitMeasure& m, double lambda, std::size_t k, const PathEvent& event);

}  // namespace cldp
