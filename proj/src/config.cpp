#include "cldp/config.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "cldp/csv.hpp"

namespace cldp {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double as_double(std::string_view key, std::string_view v) {
    try {
        return parse_double(v, key);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::uint64_t as_uint(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError(std::string(key) + ": not a nonnegative integer: '" + std::string(v) + "'");
    }
    return out;
}

bool as_bool(std::string_view key, std::string_view v) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw ConfigError(std::string(key) + ": expected 0/1/true/false, got '" + std::string(v) + "'");
}

std::vector<double> as_list(std::string_view key, std::string_view v) {
    std::vector<double> out;
    std::istringstream is{std::string(v)};
    std::string tok;
    while (is >> tok) out.push_back(as_double(key, tok));
    if (out.empty()) throw ConfigError(std::string(key) + ": empty list");
    return out;
}

std::string list_text(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += format_double(v[i]);
    }
    return s;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Field {
    Setter set;
    Getter get;
};

const std::map<std::string, Field, std::less<>>& fields() {
    static const std::map<std::string, Field, std::less<>> table = [] {
        std::map<std::string, Field, std::less<>> t;
        auto num = [&](const char* name, double ExperimentConfig::*member) {
            t[name] = {[member](ExperimentConfig& c, std::string_view k, std::string_view v) { c.*member = as_double(k, v); },
                       [member](const ExperimentConfig& c) { return format_double(c.*member); }};
        };
        auto count = [&](const char* name, std::size_t ExperimentConfig::*member) {
            t[name] = {[member](ExperimentConfig& c, std::string_view k, std::string_view v) { c.*member = as_uint(k, v); },
                       [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
        };
        t["model"] = {[](ExperimentConfig& c, std::string_view, std::string_view v) { c.model = parse_model(v); },
                      [](const ExperimentConfig& c) { return std::string(to_string(c.model)); }};
        num("lambda_rate", &ExperimentConfig::lambda);
        num("T_horizon", &ExperimentConfig::T);
        num("eta", &ExperimentConfig::eta);
        t["family"] = {[](ExperimentConfig& c, std::string_view, std::string_view v) { c.spec.x_law.family = parse_family(v); },
                       [](const ExperimentConfig& c) { return std::string(to_string(c.spec.x_law.family)); }};
        t["alpha"] = {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.x_law.alpha = as_double(k, v); },
                      [](const ExperimentConfig& c) { return format_double(c.spec.x_law.alpha); }};
        t["scale"] = {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.x_law.scale = as_double(k, v); },
                      [](const ExperimentConfig& c) { return format_double(c.spec.x_law.scale); }};
        t["dependence"] = {[](ExperimentConfig& c, std::string_view, std::string_view v) { c.spec.dependence = parse_dependence(v); },
                           [](const ExperimentConfig& c) { return std::string(to_string(c.spec.dependence)); }};
        t["k_param"] = {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.k_param = as_double(k, v); },
                        [](const ExperimentConfig& c) { return format_double(c.spec.k_param); }};
        t["k_alpha"] = {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.k_alpha = as_double(k, v); },
                        [](const ExperimentConfig& c) { return format_double(c.spec.k_alpha); }};
        t["phi"] = {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.spec.phi = as_double(k, v); },
                    [](const ExperimentConfig& c) { return format_double(c.spec.phi); }};
        t["wait_family"] = {[](ExperimentConfig& c, std::string_view, std::string_view v) {
                                try {
                                    c.wait.law.family = parse_family(v);
                                } catch (const ConfigError& e) {
                                    throw ConfigError("wait_" + std::string(e.what()));
                                }
                            },
                            [](const ExperimentConfig& c) { return std::string(to_string(c.wait.law.family)); }};
        t["wait_alpha"] = {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.wait.law.alpha = as_double(k, v); },
                           [](const ExperimentConfig& c) { return format_double(c.wait.law.alpha); }};
        t["wait_scale"] = {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.wait.law.scale = as_double(k, v); },
                           [](const ExperimentConfig& c) { return format_double(c.wait.law.scale); }};
        t["wait_conditional"] = {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.wait.conditional_on_mark = as_bool(k, v); },
                                 [](const ExperimentConfig& c) { return std::string(c.wait.conditional_on_mark ? "1" : "0"); }};
        t["allow_infinite_wait"] = {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.wait.allow_infinite_mean = as_bool(k, v); },
                                    [](const ExperimentConfig& c) { return std::string(c.wait.allow_infinite_mean ? "1" : "0"); }};
        count("k", &ExperimentConfig::k);
        t["event"] = {[](ExperimentConfig& c, std::string_view, std::string_view v) {
                          try {
                              c.event = parse_event(v);
                          } catch (const std::invalid_argument& e) {
                              throw ConfigError(e.what());
                          }
                      },
                      [](const ExperimentConfig& c) { return format_event(c.event); }};
        t["estimator"] = {[](ExperimentConfig& c, std::string_view, std::string_view v) { c.estimator = parse_estimator(v); },
                          [](const ExperimentConfig& c) { return std::string(to_string(c.estimator)); }};
        count("n_reps", &ExperimentConfig::n_reps);
        t["seed"] = {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.seed = as_uint(k, v); },
                     [](const ExperimentConfig& c) { return std::to_string(c.seed); }};
        num("delta", &ExperimentConfig::delta);
        count("grid_n", &ExperimentConfig::grid_n);
        count("centering_mc", &ExperimentConfig::centering_mc);
        count("cap", &ExperimentConfig::cap);
        count("pbig_samples", &ExperimentConfig::pbig_samples);
        num("tail_tol", &ExperimentConfig::tail_tol);
        num("y", &ExperimentConfig::y);
        num("c", &ExperimentConfig::c);
        t["T_grid"] = {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.T_grid = as_list(k, v); },
                       [](const ExperimentConfig& c) { return list_text(c.T_grid); }};
        num("epsilon", &ExperimentConfig::epsilon);
        t["quantile_levels"] = {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.quantile_levels = as_list(k, v); },
                                [](const ExperimentConfig& c) { return list_text(c.quantile_levels); }};
        count("n_clusters", &ExperimentConfig::n_clusters);
        return t;
    }();
    return table;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::set<std::string, std::less<>> seen;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find_first_of("\n,;", pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view entry = text.substr(pos, end - pos);
        pos = end + 1;
        if (const auto hash = entry.find('#'); hash != std::string_view::npos) entry = entry.substr(0, hash);
        entry = trim(entry);
        if (entry.empty()) continue;
        const auto eq = entry.find('=');
        if (eq == std::string_view::npos) throw ConfigError(std::string(entry) + ": expected key=value");
        const auto key = trim(entry.substr(0, eq));
        const auto value = trim(entry.substr(eq + 1));
        const auto it = fields().find(key);
        if (it == fields().end()) throw ConfigError(std::string(key) + ": unknown key");
        if (!seen.insert(std::string(key)).second) throw ConfigError(std::string(key) + ": duplicate key");
        it->second.set(cfg, key, value);
    }
    cfg.validate();
    if (!seen.contains("seed")) throw ConfigError("seed: required key missing (no default seed)");
    return cfg;
}

std::string emit_config(const ExperimentConfig& config) {
    std::string out;
    for (const auto& [key, field] : fields()) out += key + "=" + field.get(config) + "\n";
    return out;
}

std::string config_hash(const ExperimentConfig& config) {
    const auto h = label_hash(emit_config(config));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace cldp
