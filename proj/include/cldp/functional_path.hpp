#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cldp/cadlag_path.hpp"
#include "cldp/cluster_gen.hpp"
#include "cldp/heavy_tails.hpp"
#include "cldp/rng.hpp"

namespace cldp {

/// Large-deviation scaling x_T = T^eta.
struct ScalingRule {
    double eta = 0.8;
    double T = 1.0;

    double x_T() const;
    /// Requires eta > max(1/alpha, 1/2); pass alpha = 0 for light-tailed marks.
    void validate(double alpha) const;
};

/// v(x) = 1 / P(X > x) for the mark law.
double speed(const TailLaw& mark_law, double x);
/// v'(x_T) = v(x_T) / T.
double speed_prime(const TailLaw& mark_law, const ScalingRule& scaling);

/// An event at absolute time `time` with mark `mark`.
struct TimedMark {
    double time = 0.0;
    double mark = 0.0;
};

/// Pure-jump path on [0,1] with a jump of size mark at time/T for every event
/// with time <= T. Equal times are merged by summation. `events` is reordered.
CadlagPath build_jump_path(std::vector<TimedMark>& events, double T);

/// Uncentered cumulative path of the given clusters (all immigrants in [0,T]).
CadlagPath build_uncentered(std::span<const Cluster> clusters, double T);

inline constexpr std::size_t kDefaultCenteringGrid = 1024;

/// Mixed Binomial centering m(t) = E[sum of marks arriving by tT] on a uniform
/// grid of grid_n + 1 points. Closed form whenever the waiting-time law does
/// not depend on the mark; deterministic quadrature over the mark law
/// otherwise.
CadlagPath centering_mb(double lambda, double T, const JointMarkSpec& spec, const WaitLaw& wait,
                        std::size_t grid_n = kDefaultCenteringGrid);

struct HawkesCentering {
    CadlagPath path;                ///< m(t) on the uniform grid
    std::vector<double> stderr_band;  ///< standard error at every grid point
    std::size_t n_clusters = 0;     ///< clusters used
    std::size_t n_truncated = 0;    ///< excluded because the cap fired
};

/// Hawkes centering m(t) = lambda * (tT E[X] + E[sum_j D_j (tT - W_j)^+]), the
/// expectation over first-generation subtrees estimated from n_mc clusters.
HawkesCentering centering_hawkes(double lambda, double T, const JointMarkSpec& spec, const WaitLaw& wait,
                                 std::size_t n_mc, std::size_t grid_n, Stream& rng,
                                 std::size_t cap = kDefaultClusterCap);

/// (uncentered - centering) / x_T on the merged node set.
CadlagPath centered_scaled_path(const CadlagPath& uncentered, const CadlagPath& centering,
                                const ScalingRule& scaling);

/// (a - b) * factor on the merged node set.
CadlagPath combine_paths(const CadlagPath& a, const CadlagPath& b, double factor);

}  // namespace cldp
