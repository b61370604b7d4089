#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "cldp/cadlag_path.hpp"

namespace cldp {

enum class EventKind { terminal_exceed, value_at, sup_exceed, jump_count, dk_proxy };

/// Rare event on scaled paths.
///
/// terminal_exceed(c):  x(1) > c
/// value_at(s, c):      x(s) > c
/// sup_exceed(c):       sup x > c
/// jump_count(m, r):    at least m jumps of size > r
/// dk_proxy(k, r):      (k+1)-th largest |jump| > 2r
struct PathEvent {
    EventKind kind = EventKind::terminal_exceed;
    double s = 1.0;        ///< value_at time
    double level = 1.0;    ///< c or r
    std::size_t count = 0; ///< m for jump_count, k for dk_proxy

    static PathEvent terminal_exceed(double c);
    static PathEvent value_at(double s, double c);
    static PathEvent sup_exceed(double c);
    static PathEvent jump_count(std::size_t m, double r);
    static PathEvent dk_proxy(std::size_t k, double r);

    /// Throws std::invalid_argument for s outside [0,1], r <= 0 or m == 0.
    void validate() const;

    friend bool operator==(const PathEvent&, const PathEvent&) = default;
};

/// Textual form: terminal:C, value_at:S:C, sup:C, jump_count:M:R, dk_proxy:K:R.
PathEvent parse_event(std::string_view text);
std::string format_event(const PathEvent& event);

/// Decides the event on a path with one node scan.
bool evaluate(const PathEvent& event, const CadlagPath& path);

}  // namespace cldp
