#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cldp/cadlag_path.hpp"
#include "cldp/cluster_gen.hpp"
#include "cldp/functional_path.hpp"
#include "cldp/heavy_tails.hpp"
#include "cldp/limit_measure.hpp"
#include "cldp/path_event.hpp"

namespace cldp {

enum class Model { mb, hawkes };
std::string_view to_string(Model m);
Model parse_model(std::string_view s);

enum class Estimator { crude, splitting };
std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view s);

struct ExperimentConfig {
    Model model = Model::mb;
    double lambda = 1.0;
    double T = 100.0;
    double eta = 0.8;
    JointMarkSpec spec;
    WaitLaw wait;
    std::size_t k = 0;
    PathEvent event = PathEvent::terminal_exceed(1.0);
    Estimator estimator = Estimator::splitting;
    std::size_t n_reps = 10000;
    std::uint64_t seed = 0;
    double delta = 0.5;

    std::size_t grid_n = kDefaultCenteringGrid;
    std::size_t centering_mc = 100000;
    std::size_t cap = kDefaultClusterCap;
    std::size_t pbig_samples = 100000;
    double tail_tol = 1e-6;

    // Inputs of the measure and check subcommands.
    double y = 1.0;
    double c = 1.0;
    std::vector<double> T_grid{25.0, 50.0, 100.0, 200.0};
    double epsilon = 0.1;
    std::vector<double> quantile_levels{0.99, 0.999};
    std::size_t n_clusters = 1000000;

    ScalingRule scaling() const { return {eta, T}; }
    /// Enforces every cross-field invariant; throws ConfigError naming the key.
    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::string seed_lineage;
};

Estimate make_estimate(double value, double std_error, std::size_t n, std::string lineage);

/// Deterministic part of the centering shared by all replications.
struct CenteringCurve {
    CadlagPath path;
    std::vector<double> stderr_band;  ///< empty for the closed-form route
    std::size_t n_truncated = 0;
};

CenteringCurve prepare_centering(const ExperimentConfig& config);

/// One cluster rooted at the immigrant, per the configured model.
Cluster generate_cluster(const ExperimentConfig& config, const Immigrant& imm, Stream& rng);

struct Replication {
    CadlagPath path;  ///< centered path scaled by 1/x_T
    bool hit = false;
};

Replication simulate_replication(const ExperimentConfig& config, const CenteringCurve& centering, Stream& rng);

/// Hit frequency over n_reps replications; replication i uses
/// derive_seed(seed, {label_hash("crude"), i}).
Estimate crude_estimate(const ExperimentConfig& config, const CenteringCurve& centering, unsigned workers);

struct StratumResult {
    std::size_t m = 0;        ///< number of big clusters
    double weight = 0.0;      ///< P(M = m)
    std::size_t n = 0;
    std::size_t hits = 0;
};

struct SplittingResult {
    Estimate estimate;
    Estimate p_big;                 ///< P(D > delta x_T)
    double big_threshold = 0.0;     ///< delta x_T
    std::vector<StratumResult> strata;
    double remainder_bound = 0.0;   ///< P(M > largest stratum)
};

/// Diagnostics of one conditioned hit, recorded on request by the splitting
/// estimator. Shares use the top k+1 jumps of the hit path.
struct HitRecord {
    std::size_t m = 0;
    double weight = 0.0;            ///< stratum weight / stratum sample size
    double top_share_total = 0.0;   ///< top jumps / uncentered terminal mass
    double top_share_excess = 0.0;  ///< top jumps / centered terminal excess
    std::size_t n_large = 0;        ///< jumps with scaled size > large_level
    double time_spread = 0.0;       ///< max - min time of the top jumps
};

/// Stratified estimator conditioning on the number M of clusters with
/// D > delta x_T. Throws std::runtime_error when no big cluster is seen
/// while estimating P(D > delta x_T). When `hits` is given, every hit is
/// recorded (in stratum, then replication order).
SplittingResult splitting_estimate(const ExperimentConfig& config, const CenteringCurve& centering,
                                   unsigned workers, std::vector<HitRecord>* hits = nullptr,
                                   double large_level = 0.0);

/// Empty when the event is admissible at order k, otherwise the reason.
std::string ldp_admissibility(const PathEvent& event, std::size_t k);

struct LdpResult {
    Estimate probability;
    Estimate ratio;           ///< v'(x_T)^{k+1} P / limit_value
    double limit_value = 0.0;
    double speed_factor = 0.0;  ///< v'(x_T)^{k+1}
    SplittingResult splitting;  ///< filled when the splitting estimator ran
};

/// Throws std::invalid_argument with the admissibility reason for events
/// not bounded away from paths with at most k jumps.
LdpResult ldp_ratio(const ExperimentConfig& config, unsigned workers);

struct RemainderRow {
    double T = 0.0;
    double x_T = 0.0;
    double estimate = 0.0;   ///< P(D^{>T} > x_T | D > x_T)
    double std_error = 0.0;
    std::size_t proposals = 0;
    std::size_t accepted = 0;
    bool low_confidence = false;
};

struct RemainderTable {
    std::vector<RemainderRow> rows;
    double spearman = 0.0;   ///< rank correlation of estimate against T
};

/// Conditional Monte Carlo over config.T_grid with config.n_clusters
/// proposals per T.
RemainderTable check_remainder(const ExperimentConfig& config, unsigned workers);

double spearman_rank(const std::vector<double>& x, const std::vector<double>& y);

struct Assumption6Row {
    double T = 0.0;
    double value = 0.0;  ///< T^eta P(W > epsilon T)
};

struct Assumption6Result {
    std::vector<Assumption6Row> rows;
    bool holds = false;
};

/// "holds" when the values are nonincreasing over the second half of the
/// grid and the last one is below 1e-2.
Assumption6Result check_assumption6(const WaitLaw& wait, double eta, double epsilon,
                                    const std::vector<double>& T_grid);

struct TailRow {
    double level = 0.0;
    double x = 0.0;                  ///< empirical level-quantile of D
    double tail_D = 0.0;             ///< empirical P(D > x)
    double ratio_D = 0.0;            ///< tail_D / (C tail_prob(x))
    double ratio_K = 0.0;            ///< P(K > x) / P(D > x)
    double ratio_mark = 0.0;         ///< tail_prob(x) / P(D > x)
    double predicted_K = 0.0;        ///< NaN when no closed form
    double predicted_mark = 0.0;     ///< 1 / C
};

struct TailTable {
    LimitMeasure measure;
    std::size_t n_clusters = 0;
    std::size_t n_truncated = 0;
    std::vector<TailRow> rows;
};

/// Simulates config.n_clusters cluster totals; K is the offspring count
/// (all non-immigrant events for Hawkes).
TailTable check_tail_equivalence(const ExperimentConfig& config, unsigned workers);

struct AnatomySummary {
    std::size_t n_hits = 0;
    double weighted_hits = 0.0;
    double median_top_share_total = 0.0;   ///< top k+1 jumps / uncentered terminal mass
    double median_top_share_excess = 0.0;  ///< top k+1 jumps / (uncentered - centering) at t = 1
    double frac_exactly_k1_large = 0.0;    ///< hits with exactly k+1 jumps above the large-jump level
    double median_time_spread = 0.0;       ///< max - min time of the top k+1 jumps
    double large_level = 0.0;              ///< scaled level defining a large jump
};

/// Conditioned-path diagnostics over the hits of the splitting estimator.
/// A jump is large when its scaled size exceeds `large_level`.
AnatomySummary big_jump_anatomy(const ExperimentConfig& config, double large_level, unsigned workers);

}  // namespace cldp
