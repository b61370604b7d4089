#include "cldp/m1_metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cldp {

CompletedGraph completed_graph(const CadlagPath& path) {
    CompletedGraph g;
    g.vertices.reserve(path.size() * 2);
    for (const auto& n : path.nodes()) {
        if (n.left != n.right) g.vertices.push_back({n.t, n.left});
        g.vertices.push_back({n.t, n.right});
    }
    return g;
}

namespace {

double linf(const GraphPoint& a, const GraphPoint& b) {
    return std::max(std::abs(a.t - b.t), std::abs(a.z - b.z));
}

struct Interval {
    double lo = 1.0;
    double hi = 0.0;
    bool empty() const { return lo > hi; }
};

// Parameters s in [0,1] with |a + s (b - a) - q|_inf <= eps.
Interval free_interval(const GraphPoint& a, const GraphPoint& b, const GraphPoint& q, double eps) {
    Interval iv{0.0, 1.0};
    auto clip = [&](double p0, double p1, double target) {
        const double d = p1 - p0;
        if (d == 0.0) {
            if (std::abs(p0 - target) > eps) iv = Interval{};
            return;
        }
        double s1 = (target - eps - p0) / d;
        double s2 = (target + eps - p0) / d;
        if (s1 > s2) std::swap(s1, s2);
        iv.lo = std::max(iv.lo, s1);
        iv.hi = std::min(iv.hi, s2);
    };
    clip(a.t, b.t, q.t);
    clip(a.z, b.z, q.z);
    return iv;
}

}  // namespace

ParametricRep parametric_rep(const CompletedGraph& graph) {
    ParametricRep rep;
    const auto& v = graph.vertices;
    std::vector<double> cum(v.size(), 0.0);
    for (std::size_t i = 1; i < v.size(); ++i) cum[i] = cum[i - 1] + linf(v[i - 1], v[i]);
    const double total = cum.empty() ? 0.0 : cum.back();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double s = total > 0.0 ? cum[i] / total : static_cast<double>(i) / std::max<double>(1.0, v.size() - 1.0);
        rep.breakpoints.push_back({s, v[i].t, v[i].z});
    }
    if (!rep.breakpoints.empty()) rep.breakpoints.back().s = 1.0;
    return rep;
}

GraphPoint evaluate(const ParametricRep& rep, double s) {
    const auto& bp = rep.breakpoints;
    if (bp.empty()) throw std::invalid_argument("evaluate: empty parametric representation");
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("evaluate: s must lie in [0,1]");
    auto it = std::upper_bound(bp.begin(), bp.end(), s,
                               [](double v, const ParametricRep::Breakpoint& b) { return v < b.s; });
    if (it == bp.end()) return {bp.back().t, bp.back().z};
    if (it == bp.begin()) return {bp.front().t, bp.front().z};
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double w = b.s > a.s ? (s - a.s) / (b.s - a.s) : 0.0;
    return {a.t + w * (b.t - a.t), a.z + w * (b.z - a.z)};
}

bool m1_decide(const CompletedGraph& ga, const CompletedGraph& gb, double eps) {
    const auto& P = ga.vertices;
    const auto& Q = gb.vertices;
    const std::size_t n = P.size();
    const std::size_t m = Q.size();
    if (n == 0 || m == 0) throw std::invalid_argument("m1_decide: empty graph");
    if (linf(P.front(), Q.front()) > eps || linf(P.back(), Q.back()) > eps) return false;
    if (n == 1) {
        for (const auto& q : Q) {
            if (linf(P[0], q) > eps) return false;
        }
        return true;
    }
    if (m == 1) {
        for (const auto& p : P) {
            if (linf(p, Q[0]) > eps) return false;
        }
        return true;
    }

    // Cell (i, j) pairs P-segment i with Q-segment j. For the current row of
    // P-vertex i we keep, per Q-segment j, the reachable part of the vertical
    // boundary (parameter along Q-segment j). For each cell we also carry the
    // reachable part of its bottom boundary (parameter along P-segment i).
    std::vector<Interval> left(m - 1);
    // Column i = 0: P vertex 0 against the Q polyline.
    bool open = true;
    for (std::size_t j = 0; j + 1 < m; ++j) {
        const Interval f = free_interval(Q[j], Q[j + 1], P[0], eps);
        if (open && !f.empty() && f.lo <= 0.0) {
            left[j] = f;
            open = f.hi >= 1.0;
        } else {
            left[j] = Interval{};
            open = false;
        }
    }
    bool bottom_open = true;  // reachability along the Q vertex 0 edge
    std::vector<Interval> right(m - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // Bottom boundary of cell (i, 0): Q vertex 0 against P-segment i.
        Interval bottom;
        {
            const Interval f = free_interval(P[i], P[i + 1], Q[0], eps);
            if (bottom_open && !f.empty() && f.lo <= 0.0) {
                bottom = f;
                bottom_open = f.hi >= 1.0;
            } else {
                bottom = Interval{};
                bottom_open = false;
            }
        }
        for (std::size_t j = 0; j + 1 < m; ++j) {
            const Interval lf = free_interval(Q[j], Q[j + 1], P[i + 1], eps);
            const Interval bf = free_interval(P[i], P[i + 1], Q[j + 1], eps);
            const Interval& l = left[j];
            // Right boundary of the cell.
            Interval r;
            if (!bottom.empty()) {
                r = lf;
            } else if (!l.empty()) {
                r = Interval{std::max(lf.lo, l.lo), lf.hi};
            }
            // Top boundary of the cell.
            Interval top;
            if (!l.empty()) {
                top = bf;
            } else if (!bottom.empty()) {
                top = Interval{std::max(bf.lo, bottom.lo), bf.hi};
            }
            right[j] = r;
            bottom = top;
        }
        std::swap(left, right);
    }
    // End corner: P vertex n-1 reached on the last Q-segment at parameter 1.
    const Interval& last = left[m - 2];
    return !last.empty() && last.hi >= 1.0;
}

M1Result m1_distance(const CadlagPath& p1, const CadlagPath& p2, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("m1_distance: tol must be > 0");
    const auto a = completed_graph(p1);
    const auto b = completed_graph(p2);
    double lo = std::max(linf(a.vertices.front(), b.vertices.front()), linf(a.vertices.back(), b.vertices.back()));
    if (m1_decide(a, b, lo)) return {lo, lo, lo};
    double zmin = INFINITY, zmax = -INFINITY;
    for (const auto* g : {&a, &b}) {
        for (const auto& v : g->vertices) {
            zmin = std::min(zmin, v.z);
            zmax = std::max(zmax, v.z);
        }
    }
    double hi = std::max(1.0, zmax - zmin) * (1.0 + 1e-12) + 1e-12;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (m1_decide(a, b, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return {0.5 * (lo + hi), lo, hi};
}

double kth_largest_jump(const CadlagPath& path, std::size_t k) {
    if (k == 0) throw std::invalid_argument("kth_largest_jump: k must be >= 1");
    std::vector<double> sizes;
    for (const auto& n : path.nodes()) {
        if (n.left != n.right) sizes.push_back(std::abs(n.jump()));
    }
    if (sizes.size() < k) return 0.0;
    std::nth_element(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(k - 1), sizes.end(),
                     std::greater<>());
    return sizes[k - 1];
}

CadlagPath dk_skeleton(const CadlagPath& path, std::size_t k) {
    auto js = jumps(path);
    std::stable_sort(js.begin(), js.end(),
                     [](const Jump& x, const Jump& y) { return std::abs(x.size) > std::abs(y.size); });
    if (js.size() > k + 1) js.resize(k + 1);
    std::sort(js.begin(), js.end(), [](const Jump& x, const Jump& y) { return x.t < y.t; });
    std::vector<PathNode> nodes;
    double level = 0.0;
    if (js.empty() || js.front().t != 0.0) nodes.push_back({0.0, 0.0, 0.0});
    for (const auto& j : js) {
        nodes.push_back({j.t, level, level + j.size});
        level += j.size;
    }
    if (nodes.back().t != 1.0) nodes.push_back({1.0, level, level});
    return CadlagPath(std::move(nodes));
}

bool exceeds_dk_proxy(const CadlagPath& path, std::size_t k, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("exceeds_dk_proxy: r must be > 0");
    return kth_largest_jump(path, k + 1) > 2.0 * r;
}

double dk_distance_upper_bound(const CadlagPath& path, std::size_t k, double tol) {
    return m1_distance(path, dk_skeleton(path, k), tol).hi;
}

}  // namespace cldp
