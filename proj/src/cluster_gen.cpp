#include "cldp/cluster_gen.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "cldp/csv.hpp"

namespace cldp {

std::vector<Immigrant> sample_immigrants(double lambda, double T, const TailLaw& mark_law, Stream& rng) {
    if (!(lambda >= 0.0)) throw ConfigError("lambda_rate: must be >= 0");
    if (!(T > 0.0)) throw ConfigError("T_horizon: must be > 0");
    const std::uint64_t n = rng.poisson(lambda * T);
    std::vector<Immigrant> out(n);
    for (auto& imm : out) imm.gamma = rng.uniform() * T;
    for (auto& imm : out) imm.mark = sample(mark_law, rng);
    std::stable_sort(out.begin(), out.end(), [](const Immigrant& a, const Immigrant& b) { return a.gamma < b.gamma; });
    return out;
}

Cluster gen_mb_cluster(const Immigrant& imm, const JointMarkSpec& spec, const WaitLaw& wait, Stream& rng) {
    Cluster c;
    c.immigrant = imm;
    const std::uint64_t k = offspring_count(spec, imm.mark, rng);
    c.events.reserve(k + 1);
    c.events.push_back({0.0, imm.mark, 0, 0});
    const TailLaw wait_law = wait.given_mark(imm.mark);
    for (std::uint64_t j = 0; j < k; ++j) {
        const double mark = sample(spec.x_law, rng);
        const double w = sample(wait_law, rng);
        c.events.push_back({w, mark, 1, 0});
    }
    return c;
}

Cluster gen_hawkes_cluster(const Immigrant& imm, const JointMarkSpec& spec, const WaitLaw& wait,
                           std::size_t cap, Stream& rng) {
    if (cap < 1) throw std::invalid_argument("gen_hawkes_cluster: cap must be >= 1");
    if (!(spec.mean_fertility() < 1.0)) {
        throw ConfigError("phi: Hawkes spec is not subcritical (phi * E[X] >= 1)");
    }
    Cluster c;
    c.immigrant = imm;
    c.events.push_back({0.0, imm.mark, 0, 0});
    // The event vector doubles as the breadth-first queue.
    for (std::size_t p = 0; p < c.events.size(); ++p) {
        const ClusterEvent parent = c.events[p];
        const std::uint64_t children = rng.poisson(spec.phi * parent.mark);
        const TailLaw wait_law = wait.given_mark(parent.mark);
        for (std::uint64_t j = 0; j < children; ++j) {
            if (c.events.size() >= cap) {
                c.truncated = true;
                return c;
            }
            const double mark = sample(spec.x_law, rng);
            const double w = sample(wait_law, rng);
            c.events.push_back({parent.offset + w, mark, parent.generation + 1, static_cast<std::uint32_t>(p)});
        }
    }
    return c;
}

double cluster_total(const Cluster& cluster) {
    double s = 0.0;
    for (const auto& e : cluster.events) s += e.mark;
    return s;
}

HorizonSplit split_at_horizon(const Cluster& cluster, double T) {
    if (cluster.immigrant.gamma > T) throw std::invalid_argument("split_at_horizon: immigrant arrives after T");
    HorizonSplit s;
    for (const auto& e : cluster.events) {
        if (cluster.immigrant.gamma + e.offset <= T) {
            s.retained_sum += e.mark;
        } else {
            s.remainder_sum += e.mark;
            ++s.remainder_count;
        }
    }
    return s;
}

std::vector<double> subtree_totals(const Cluster& cluster) {
    std::vector<double> sub(cluster.events.size());
    for (std::size_t i = 0; i < sub.size(); ++i) sub[i] = cluster.events[i].mark;
    // Parents precede children in breadth-first order.
    for (std::size_t i = sub.size(); i-- > 1;) sub[cluster.events[i].parent] += sub[i];
    return sub;
}

void write_clusters_csv(std::ostream& os, std::span<const Cluster> clusters) {
    os << "cluster_id,event_id,parent_id,generation,offset,mark\n";
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        const auto& events = clusters[c].events;
        for (std::size_t e = 0; e < events.size(); ++e) {
            os << c << ',' << e << ',' << events[e].parent << ',' << events[e].generation << ','
               << format_double(events[e].offset) << ',' << format_double(events[e].mark) << '\n';
        }
    }
}

}  // namespace cldp
