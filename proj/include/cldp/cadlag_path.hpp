#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace cldp {

struct PathNode {
    double t = 0.0;
    double left = 0.0;   ///< left limit x(t-)
    double right = 0.0;  ///< value x(t)

    double jump() const { return right - left; }
    friend bool operator==(const PathNode&, const PathNode&) = default;
};

/// Piecewise-linear-with-jumps function on [0,1]. Between consecutive nodes
/// the path is linear from right_i to left_{i+1}. Node times are strictly
/// increasing, the first is 0 and the last is 1.
class CadlagPath {
public:
    /// Identically zero path.
    CadlagPath();
    /// Throws std::invalid_argument if the node list violates the invariants.
    explicit CadlagPath(std::vector<PathNode> nodes);

    std::span<const PathNode> nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }

    friend bool operator==(const CadlagPath&, const CadlagPath&) = default;

private:
    std::vector<PathNode> nodes_;
};

/// Value x(t); throws std::domain_error outside [0,1].
double path_value(const CadlagPath& path, double t);
/// Left limit x(t-) (x(0-) is the left value of the first node).
double left_limit(const CadlagPath& path, double t);
/// sup over [0,1], left limits included; attained at a node.
double path_sup(const CadlagPath& path);
double path_inf(const CadlagPath& path);
double terminal(const CadlagPath& path);

struct Jump {
    double t = 0.0;
    double size = 0.0;
};

/// Nodes with right != left, in time order.
std::vector<Jump> jumps(const CadlagPath& path);

/// Drops interior nodes that are neither jumps nor kinks (exactly collinear
/// neighbours, relative tolerance rel_tol).
CadlagPath simplify(const CadlagPath& path, double rel_tol = 1e-12);

/// CSV with header t,left,right.
void write_path_csv(std::ostream& os, const CadlagPath& path);
CadlagPath read_path_csv(std::istream& is);

}  // namespace cldp
