#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cldp/heavy_tails.hpp"
#include "cldp/rng.hpp"

namespace cldp {

struct Immigrant {
    double gamma = 0.0;  ///< arrival time in [0, T]
    double mark = 0.0;
};

/// One event of a cluster. Event 0 is the immigrant (offset 0, generation 0,
/// parent 0); every other event has generation = parent generation + 1 and
/// offset = parent offset + waiting time.
struct ClusterEvent {
    double offset = 0.0;
    double mark = 0.0;
    std::uint32_t generation = 0;
    std::uint32_t parent = 0;
};

struct Cluster {
    Immigrant immigrant;
    std::vector<ClusterEvent> events;
    bool truncated = false;  ///< safety cap fired during generation
};

inline constexpr std::size_t kDefaultClusterCap = 1'000'000;

/// Homogeneous Poisson arrivals on [0, T] with i.i.d. marks from mark_law,
/// sorted by arrival time. Stream use: count, then all arrival times, then all
/// marks.
std::vector<Immigrant> sample_immigrants(double lambda, double T, const TailLaw& mark_law, Stream& rng);

/// Mixed Binomial cluster: K offspring (K given the immigrant mark per spec),
/// i.i.d. marks, waiting times drawn given the immigrant mark; generation 1.
Cluster gen_mb_cluster(const Immigrant& imm, const JointMarkSpec& spec, const WaitLaw& wait, Stream& rng);

/// Hawkes cluster by breadth-first Galton-Watson recursion: an event of mark X
/// has Poisson(phi * X) children. Stops at `cap` events (truncated = true).
/// Throws ConfigError for supercritical specs.
Cluster gen_hawkes_cluster(const Immigrant& imm, const JointMarkSpec& spec, const WaitLaw& wait,
                           std::size_t cap, Stream& rng);

/// Sum of all event marks, immigrant included.
double cluster_total(const Cluster& cluster);

struct HorizonSplit {
    double retained_sum = 0.0;   ///< marks with gamma + offset <= T
    double remainder_sum = 0.0;  ///< marks with gamma + offset > T
    std::size_t remainder_count = 0;
};

/// Throws std::invalid_argument when the immigrant arrives after T.
HorizonSplit split_at_horizon(const Cluster& cluster, double T);

/// Sum of marks in the subtree rooted at every event (index-aligned with
/// cluster.events). Entry 0 equals cluster_total.
std::vector<double> subtree_totals(const Cluster& cluster);

/// CSV with header cluster_id,event_id,parent_id,generation,offset,mark.
void write_clusters_csv(std::ostream& os, std::span<const Cluster> clusters);

}  // namespace cldp
