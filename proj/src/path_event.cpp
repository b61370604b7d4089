#include "cldp/path_event.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cldp/csv.hpp"
#include "cldp/m1_metric.hpp"

namespace cldp {

PathEvent PathEvent::terminal_exceed(double c) { return {EventKind::terminal_exceed, 1.0, c, 0}; }
PathEvent PathEvent::value_at(double s, double c) { return {EventKind::value_at, s, c, 0}; }
PathEvent PathEvent::sup_exceed(double c) { return {EventKind::sup_exceed, 1.0, c, 0}; }
PathEvent PathEvent::jump_count(std::size_t m, double r) { return {EventKind::jump_count, 1.0, r, m}; }
PathEvent PathEvent::dk_proxy(std::size_t k, double r) { return {EventKind::dk_proxy, 1.0, r, k}; }

void PathEvent::validate() const {
    if (!std::isfinite(level)) throw std::invalid_argument("event: threshold must be finite");
    switch (kind) {
        case EventKind::value_at:
            if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("event: value_at time must lie in [0,1]");
            break;
        case EventKind::jump_count:
            if (count == 0) throw std::invalid_argument("event: jump_count needs m >= 1");
            if (!(level > 0.0)) throw std::invalid_argument("event: jump_count needs r > 0");
            break;
        case EventKind::dk_proxy:
            if (!(level > 0.0)) throw std::invalid_argument("event: dk_proxy needs r > 0");
            break;
        default: break;
    }
}

namespace {

std::size_t parse_count(std::string_view text) {
    std::size_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("event: not a nonnegative integer: '" + std::string(text) + "'");
    }
    return v;
}

std::vector<std::string_view> split_colon(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(':', start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

PathEvent parse_event(std::string_view text) {
    const auto p = split_colon(text);
    auto need = [&](std::size_t n) {
        if (p.size() != n) throw std::invalid_argument("event: wrong number of fields in '" + std::string(text) + "'");
    };
    PathEvent e;
    if (p[0] == "terminal") {
        need(2);
        e = PathEvent::terminal_exceed(parse_double(p[1], "event"));
    } else if (p[0] == "value_at") {
        need(3);
        e = PathEvent::value_at(parse_double(p[1], "event"), parse_double(p[2], "event"));
    } else if (p[0] == "sup") {
        need(2);
        e = PathEvent::sup_exceed(parse_double(p[1], "event"));
    } else if (p[0] == "jump_count") {
        need(3);
        e = PathEvent::jump_count(parse_count(p[1]), parse_double(p[2], "event"));
    } else if (p[0] == "dk_proxy") {
        need(3);
        e = PathEvent::dk_proxy(parse_count(p[1]), parse_double(p[2], "event"));
    } else {
        throw std::invalid_argument("event: unknown kind '" + std::string(p[0]) + "'");
    }
    e.validate();
    return e;
}

std::string format_event(const PathEvent& e) {
    switch (e.kind) {
        case EventKind::terminal_exceed: return "terminal:" + format_double(e.level);
        case EventKind::value_at: return "value_at:" + format_double(e.s) + ":" + format_double(e.level);
        case EventKind::sup_exceed: return "sup:" + format_double(e.level);
        case EventKind::jump_count: return "jump_count:" + std::to_string(e.count) + ":" + format_double(e.level);
        case EventKind::dk_proxy: return "dk_proxy:" + std::to_string(e.count) + ":" + format_double(e.level);
    }
    return {};
}

bool evaluate(const PathEvent& e, const CadlagPath& path) {
    switch (e.kind) {
        case EventKind::terminal_exceed: return terminal(path) > e.level;
        case EventKind::value_at: return path_value(path, e.s) > e.level;
        case EventKind::sup_exceed: return path_sup(path) > e.level;
        case EventKind::jump_count: {
            std::size_t n = 0;
            for (const auto& node : path.nodes()) {
                if (std::abs(node.jump()) > e.level && ++n >= e.count) return true;
            }
            return false;
        }
        case EventKind::dk_proxy: return exceeds_dk_proxy(path, e.count, e.level);
    }
    return false;
}

}  // namespace cldp
