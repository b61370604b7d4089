#include "cldp/cadlag_path.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cldp/csv.hpp"

namespace cldp {

CadlagPath::CadlagPath() : nodes_{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}} {}

CadlagPath::CadlagPath(std::vector<PathNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw std::invalid_argument("CadlagPath: need at least the nodes t=0 and t=1");
    if (nodes_.front().t != 0.0 || nodes_.back().t != 1.0) {
        throw std::invalid_argument("CadlagPath: first node must be at t=0 and last at t=1");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (!std::isfinite(n.t) || !std::isfinite(n.left) || !std::isfinite(n.right)) {
            throw std::invalid_argument("CadlagPath: non-finite node");
        }
        if (i > 0 && !(nodes_[i - 1].t < n.t)) {
            throw std::invalid_argument("CadlagPath: node times must be strictly increasing");
        }
    }
}

namespace {

// Index of the last node with t_i <= t.
std::size_t segment_index(std::span<const PathNode> nodes, double t) {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), t,
                               [](double v, const PathNode& n) { return v < n.t; });
    return static_cast<std::size_t>(it - nodes.begin()) - 1;
}

void check_domain(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("path evaluation: t must lie in [0,1]");
}

}  // namespace

double path_value(const CadlagPath& path, double t) {
    check_domain(t);
    const auto nodes = path.nodes();
    const std::size_t i = segment_index(nodes, t);
    const auto& a = nodes[i];
    if (t == a.t || i + 1 == nodes.size()) return a.right;
    const auto& b = nodes[i + 1];
    const double w = (t - a.t) / (b.t - a.t);
    return a.right + w * (b.left - a.right);
}

double left_limit(const CadlagPath& path, double t) {
    check_domain(t);
    const auto nodes = path.nodes();
    const std::size_t i = segment_index(nodes, t);
    if (nodes[i].t == t) return nodes[i].left;
    return path_value(path, t);
}

double path_sup(const CadlagPath& path) {
    double s = -INFINITY;
    for (const auto& n : path.nodes()) s = std::max({s, n.left, n.right});
    return s;
}

double path_inf(const CadlagPath& path) {
    double s = INFINITY;
    for (const auto& n : path.nodes()) s = std::min({s, n.left, n.right});
    return s;
}

double terminal(const CadlagPath& path) { return path.nodes().back().right; }

std::vector<Jump> jumps(const CadlagPath& path) {
    std::vector<Jump> out;
    for (const auto& n : path.nodes()) {
        if (n.right != n.left) out.push_back({n.t, n.jump()});
    }
    return out;
}

CadlagPath simplify(const CadlagPath& path, double rel_tol) {
    const auto nodes = path.nodes();
    std::vector<PathNode> out;
    out.push_back(nodes.front());
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.left != n.right) {
            out.push_back(n);
            continue;
        }
        const auto& a = out.back();
        const auto& b = nodes[i + 1];
        const double predicted = a.right + (n.t - a.t) / (b.t - a.t) * (b.left - a.right);
        const double scale = std::max({std::abs(a.right), std::abs(b.left), std::abs(n.right), 1e-300});
        if (std::abs(predicted - n.right) > rel_tol * scale) out.push_back(n);
    }
    out.push_back(nodes.back());
    return CadlagPath(std::move(out));
}

void write_path_csv(std::ostream& os, const CadlagPath& path) {
    os << "t,left,right\n";
    for (const auto& n : path.nodes()) {
        os << format_double(n.t) << ',' << format_double(n.left) << ',' << format_double(n.right) << '\n';
    }
}

CadlagPath read_path_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("path CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,left,right") throw std::invalid_argument("path CSV: expected header 't,left,right'");
    std::vector<PathNode> nodes;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cols = split_csv_line(line);
        if (cols.size() != 3) {
            throw std::invalid_argument("path CSV line " + std::to_string(lineno) + ": expected 3 columns");
        }
        nodes.push_back({parse_double(cols[0], "t"), parse_double(cols[1], "left"), parse_double(cols[2], "right")});
    }
    return CadlagPath(std::move(nodes));
}

}  // namespace cldp
