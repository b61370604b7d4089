#pragma once

#include <cstddef>
#include <vector>

#include "cldp/cadlag_path.hpp"

namespace cldp {

struct GraphPoint {
    double t = 0.0;
    double z = 0.0;
    friend bool operator==(const GraphPoint&, const GraphPoint&) = default;
};

/// Completed graph of a path as a polyline: every jump node contributes the
/// vertical segment (t, left) -> (t, right), every other node a single vertex.
struct CompletedGraph {
    std::vector<GraphPoint> vertices;
};

CompletedGraph completed_graph(const CadlagPath& path);

/// Parametric representation of a completed graph: breakpoint s_i for each
/// vertex, proportional to cumulative max(|dt|, |dz|) length.
struct ParametricRep {
    struct Breakpoint {
        double s = 0.0;
        double t = 0.0;
        double z = 0.0;
    };
    std::vector<Breakpoint> breakpoints;
};

ParametricRep parametric_rep(const CompletedGraph& graph);
/// Point of the representation at s in [0,1].
GraphPoint evaluate(const ParametricRep& rep, double s);

/// True iff some pair of monotone traversals of the two graphs stays within
/// eps in the max(|dt|, |dz|) metric (free-space reachability sweep).
bool m1_decide(const CompletedGraph& a, const CompletedGraph& b, double eps);

struct M1Result {
    double value = 0.0;  ///< bracket midpoint
    double lo = 0.0;     ///< largest eps known to fail (or the exact value)
    double hi = 0.0;     ///< smallest eps known to succeed
};

/// M1 distance by bisection on m1_decide until hi - lo <= tol.
/// Throws std::invalid_argument when tol <= 0.
M1Result m1_distance(const CadlagPath& p1, const CadlagPath& p2, double tol = 1e-9);

/// k-th largest |jump| (k >= 1); 0 when the path has fewer than k jumps.
double kth_largest_jump(const CadlagPath& path, std::size_t k);

/// Pure-jump path keeping the min(k+1, #jumps) largest jumps at their times.
/// Equal sizes keep the earlier jump.
CadlagPath dk_skeleton(const CadlagPath& path, std::size_t k);

/// (k+1)-th largest jump > 2r. Throws std::invalid_argument when r <= 0.
bool exceeds_dk_proxy(const CadlagPath& path, std::size_t k, double r);

/// Upper bound on the M1 distance from path to the set of paths with at most
/// k jumps: the distance to dk_skeleton(path, k).
double dk_distance_upper_bound(const CadlagPath& path, std::size_t k, double tol = 1e-9);

}  // namespace cldp
