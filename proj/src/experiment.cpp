#include "cldp/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "cldp/config.hpp"
#include "cldp/csv.hpp"
#include "cldp/parallel.hpp"

namespace cldp {

namespace fs = std::filesystem;
using nlohmann::json;

CheckKind parse_check_kind(std::string_view s) {
    if (s == "remainder") return CheckKind::remainder;
    if (s == "assumption6") return CheckKind::assumption6;
    if (s == "tails") return CheckKind::tails;
    throw std::invalid_argument("check: expected remainder, assumption6 or tails, got '" + std::string(s) + "'");
}

std::string_view to_string(CheckKind k) {
    switch (k) {
        case CheckKind::remainder: return "remainder";
        case CheckKind::assumption6: return "assumption6";
        case CheckKind::tails: return "tails";
    }
    return "?";
}

namespace {

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json estimate_json(const Estimate& e) {
    return {{"value", e.value}, {"stderr", e.std_error}, {"n", e.n},
            {"ci95", {e.ci_lo, e.ci_hi}}, {"seed_lineage", e.seed_lineage}};
}

void write_json(const fs::path& p, const json& j, RunRecord& rec) {
    write_file_atomic(p, j.dump(2) + "\n");
    rec.outputs.push_back(p.string());
}

void write_text(const fs::path& p, const std::string& s, RunRecord& rec) {
    write_file_atomic(p, s);
    rec.outputs.push_back(p.string());
}

void run_simulate(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out, RunRecord& rec) {
    Stream rng(derive_seed(cfg.seed, {label_hash("simulate")}));
    const auto imms = sample_immigrants(cfg.lambda, cfg.T, cfg.spec.x_law, rng);
    std::vector<Cluster> clusters;
    for (const auto& imm : imms) clusters.push_back(generate_cluster(cfg, imm, rng));
    const auto uncentered = build_uncentered(clusters, cfg.T);
    const auto centering = prepare_centering(cfg);
    const auto path = simplify(centered_scaled_path(uncentered, centering.path, cfg.scaling()));

    std::ostringstream cs, ps;
    write_clusters_csv(cs, clusters);
    write_path_csv(ps, path);
    write_text(dir / "clusters.csv", cs.str(), rec);
    write_text(dir / "path.csv", ps.str(), rec);

    std::size_t events = 0, truncated = 0;
    for (const auto& c : clusters) {
        events += c.events.size();
        truncated += c.truncated;
    }
    json j = {{"config_hash", rec.config_hash},   {"seed", cfg.seed},
              {"n_immigrants", clusters.size()},  {"n_events", events},
              {"n_truncated", truncated},         {"x_T", cfg.scaling().x_T()},
              {"uncentered_terminal", terminal(uncentered)},
              {"path_terminal", terminal(path)},  {"path_sup", path_sup(path)},
              {"path_nodes", path.size()},        {"event", format_event(cfg.event)},
              {"event_hit", evaluate(cfg.event, path)}};
    write_json(dir / "simulate.json", j, rec);
    out << "immigrants=" << clusters.size() << " events=" << events << " terminal=" << g17(terminal(path)) << "\n";
}

void run_measure(const ExperimentConfig& cfg, std::ostream& out) {
    const auto m = limit_measure_for(cfg.spec, cfg.model == Model::hawkes);
    out << "model=" << to_string(m.model) << "\n";
    out << "constant=" << g17(m.constant) << "\n";
    out << "mu_tail=" << g17(mu_tail(m, cfg.y)) << "\n";
    const auto bar = mu_bar_tail_detailed(m, cfg.lambda, cfg.k, cfg.c);
    out << "mu_bar_tail=" << g17(bar.value) << "\n";
    if (bar.error > 0.0) out << "mu_bar_tail_stderr=" << g17(bar.error) << "\n";
    out << "mu_sharp=" << g17(mu_sharp(m, cfg.lambda, cfg.k, cfg.event)) << "\n";
}

void run_ldp(const ExperimentConfig& cfg, const fs::path& dir, unsigned workers, std::ostream& out, RunRecord& rec) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = ldp_ratio(cfg, workers);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string row = ldp_result_row(cfg, r);
    write_text(dir / "results.csv", std::string(kLdpResultHeader) + "\n" + row + "\n", rec);

    const std::string log_header =
        "config_hash,T,eta,k,event,estimate,stderr,limit_value,ratio,n_reps,wall_seconds,seed";
    const std::string log_row = rec.config_hash + "," + format_double(cfg.T) + "," + format_double(cfg.eta) + "," +
                                std::to_string(cfg.k) + "," + format_event(cfg.event) + "," +
                                format_double(r.probability.value) + "," + format_double(r.probability.std_error) +
                                "," + format_double(r.limit_value) + "," + format_double(r.ratio.value) + "," +
                                std::to_string(cfg.n_reps) + "," + format_double(wall) + "," +
                                std::to_string(cfg.seed) + "\n";
    append_csv_atomic(dir / "ldp_log.csv", log_header, log_row);
    rec.outputs.push_back((dir / "ldp_log.csv").string());

    json j = {{"config_hash", rec.config_hash},
              {"estimator", to_string(cfg.estimator)},
              {"probability", estimate_json(r.probability)},
              {"ratio", estimate_json(r.ratio)},
              {"limit_value", r.limit_value},
              {"speed_factor", r.speed_factor},
              {"wall_seconds", wall}};
    if (cfg.estimator == Estimator::splitting) {
        json strata = json::array();
        for (const auto& s : r.splitting.strata) {
            strata.push_back({{"m", s.m}, {"weight", s.weight}, {"n", s.n}, {"hits", s.hits}});
        }
        j["splitting"] = {{"p_big", estimate_json(r.splitting.p_big)},
                          {"big_threshold", r.splitting.big_threshold},
                          {"remainder_bound", r.splitting.remainder_bound},
                          {"strata", strata}};
    }
    write_json(dir / "ldp.json", j, rec);
    out << "probability=" << g17(r.probability.value) << " stderr=" << g17(r.probability.std_error) << "\n";
    out << "limit_value=" << g17(r.limit_value) << " ratio=" << g17(r.ratio.value)
        << " ratio_stderr=" << g17(r.ratio.std_error) << "\n";
}

void run_check(const ExperimentConfig& cfg, CheckKind kind, const fs::path& dir, unsigned workers, std::ostream& out,
               RunRecord& rec) {
    json j = {{"config_hash", rec.config_hash}, {"check", to_string(kind)}};
    std::string csv;
    bool pass = false;
    switch (kind) {
        case CheckKind::remainder: {
            const auto t = check_remainder(cfg, workers);
            csv = "T,x_T,estimate,stderr,proposals,accepted,low_confidence\n";
            json rows = json::array();
            bool confident = true;
            for (const auto& r : t.rows) {
                csv += format_double(r.T) + "," + format_double(r.x_T) + "," + format_double(r.estimate) + "," +
                       format_double(r.std_error) + "," + std::to_string(r.proposals) + "," +
                       std::to_string(r.accepted) + "," + (r.low_confidence ? "1" : "0") + "\n";
                rows.push_back({{"T", r.T}, {"estimate", r.estimate}, {"stderr", r.std_error},
                                {"accepted", r.accepted}, {"low_confidence", r.low_confidence}});
                confident = confident && !r.low_confidence;
                out << "T=" << g17(r.T) << " estimate=" << g17(r.estimate) << " stderr=" << g17(r.std_error)
                    << (r.low_confidence ? " low_confidence" : "") << "\n";
            }
            pass = t.rows.size() >= 2 && t.spearman <= -0.9 && t.rows.back().estimate < 0.05 && confident;
            j["rows"] = rows;
            j["spearman"] = t.spearman;
            out << "spearman=" << g17(t.spearman) << "\n";
            break;
        }
        case CheckKind::assumption6: {
            const auto a = check_assumption6(cfg.wait, cfg.eta, cfg.epsilon, cfg.T_grid);
            csv = "T,value\n";
            json rows = json::array();
            for (const auto& r : a.rows) {
                csv += format_double(r.T) + "," + format_double(r.value) + "\n";
                rows.push_back({{"T", r.T}, {"value", r.value}});
                out << "T=" << g17(r.T) << " value=" << g17(r.value) << "\n";
            }
            pass = a.holds;
            j["rows"] = rows;
            j["assumption6"] = a.holds ? "holds" : "violated";
            out << "assumption6=" << (a.holds ? "holds" : "violated") << "\n";
            break;
        }
        case CheckKind::tails: {
            const auto t = check_tail_equivalence(cfg, workers);
            csv = "level,x,tail_D,ratio_D,ratio_K,ratio_mark,predicted_K,predicted_mark\n";
            json rows = json::array();
            pass = true;
            for (const auto& r : t.rows) {
                csv += format_double(r.level) + "," + format_double(r.x) + "," + format_double(r.tail_D) + "," +
                       format_double(r.ratio_D) + "," + format_double(r.ratio_K) + "," + format_double(r.ratio_mark) +
                       "," + format_double(r.predicted_K) + "," + format_double(r.predicted_mark) + "\n";
                rows.push_back({{"level", r.level}, {"x", r.x}, {"ratio_D", r.ratio_D}, {"ratio_K", r.ratio_K},
                                {"ratio_mark", r.ratio_mark}});
                pass = pass && r.ratio_D >= 0.85 && r.ratio_D <= 1.15;
                out << "level=" << g17(r.level) << " x=" << g17(r.x) << " ratio_D=" << g17(r.ratio_D)
                    << " ratio_K=" << g17(r.ratio_K) << " ratio_mark=" << g17(r.ratio_mark) << "\n";
            }
            j["rows"] = rows;
            j["constant"] = t.measure.constant;
            j["n_truncated"] = t.n_truncated;
            break;
        }
    }
    j["pass"] = pass;
    rec.ok = pass;
    const std::string stem = "check_" + std::string(to_string(kind));
    write_text(dir / (stem + ".csv"), csv, rec);
    write_json(dir / (stem + ".json"), j, rec);
    out << "verdict=" << (pass ? "pass" : "fail") << "\n";
}

}  // namespace

std::string ldp_result_row(const ExperimentConfig& cfg, const LdpResult& r) {
    return config_hash(cfg) + "," + format_double(cfg.T) + "," + format_double(cfg.eta) + "," + std::to_string(cfg.k) +
           "," + format_event(cfg.event) + "," + format_double(r.probability.value) + "," +
           format_double(r.probability.std_error) + "," + format_double(r.limit_value) + "," +
           format_double(r.ratio.value) + "," + std::to_string(cfg.n_reps) + "," + std::to_string(cfg.seed);
}

RunRecord run(std::string_view subcommand, const ExperimentConfig& config, const fs::path& out_dir,
              const RunOptions& options, std::ostream& out) {
    config.validate();
    RunRecord rec;
    rec.subcommand = std::string(subcommand);
    rec.config_hash = config_hash(config);
    rec.timestamp = utc_now();
    rec.seed = config.seed;
    const unsigned workers = resolve_workers(options.workers);

    if (subcommand == "measure") {
        run_measure(config, out);
        return rec;
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());

    if (subcommand == "simulate") {
        run_simulate(config, out_dir, out, rec);
    } else if (subcommand == "ldp") {
        run_ldp(config, out_dir, workers, out, rec);
    } else if (subcommand == "check") {
        run_check(config, options.check, out_dir, workers, out, rec);
    } else {
        throw std::invalid_argument("unknown subcommand '" + std::string(subcommand) + "'");
    }
    json j = {{"subcommand", rec.subcommand}, {"config_hash", rec.config_hash}, {"timestamp", rec.timestamp},
              {"version", rec.version},       {"outputs", rec.outputs},         {"seed", rec.seed},
              {"ok", rec.ok}};
    append_csv_atomic(out_dir / "runs.jsonl", "", j.dump() + "\n");
    return rec;
}

}  // namespace cldp
