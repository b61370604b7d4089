// Command-line front end: simulate, m1, measure, ldp, check.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cldp/cadlag_path.hpp"
#include "cldp/config.hpp"
#include "cldp/csv.hpp"
#include "cldp/experiment.hpp"
#include "cldp/m1_metric.hpp"

namespace {

cldp::ExperimentConfig load(const std::string& path) { return cldp::parse_config(cldp::read_file(path)); }

cldp::CadlagPath load_path(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    try {
        return cldp::read_path_csv(is);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and verification toolkit for heavy-tailed Poisson cluster processes"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    unsigned workers = 0;

    auto* simulate = app.add_subcommand("simulate", "simulate one replication and write clusters/path CSVs");
    simulate->add_option("--config", config_path, "config file")->required();
    simulate->add_option("--out", out_dir, "output directory")->required();

    std::string p1, p2;
    double tol = 1e-9;
    auto* m1 = app.add_subcommand("m1", "M1 distance between two path CSVs");
    m1->add_option("path1", p1)->required();
    m1->add_option("path2", p2)->required();
    m1->add_option("--tol", tol, "bisection tolerance")->check(CLI::PositiveNumber);

    auto* measure = app.add_subcommand("measure", "evaluate the limit measures");
    measure->add_option("--config", config_path, "config file")->required();

    auto* ldp = app.add_subcommand("ldp", "estimate the large-deviation ratio");
    ldp->add_option("--config", config_path, "config file")->required();
    ldp->add_option("--out", out_dir, "output directory");
    ldp->add_option("--workers", workers, "worker threads (default: $CLDP_WORKERS or all cores)");

    std::string check_kind;
    auto* check = app.add_subcommand("check", "assumption and tail checks");
    check->add_option("kind", check_kind, "remainder | assumption6 | tails")
        ->required()
        ->check(CLI::IsMember({"remainder", "assumption6", "tails"}));
    check->add_option("--config", config_path, "config file")->required();
    check->add_option("--out", out_dir, "output directory");
    check->add_option("--workers", workers, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (m1->parsed()) {
            const auto r = cldp::m1_distance(load_path(p1), load_path(p2), tol);
            std::printf("distance=%.17g\nbracket=[%.17g, %.17g]\n", r.value, r.lo, r.hi);
            return 0;
        }
        const auto cfg = load(config_path);
        cldp::RunOptions opts;
        opts.workers = workers;
        std::string sub;
        if (simulate->parsed()) sub = "simulate";
        if (measure->parsed()) sub = "measure";
        if (ldp->parsed()) sub = "ldp";
        if (check->parsed()) {
            sub = "check";
            opts.check = cldp::parse_check_kind(check_kind);
        }
        const auto rec = cldp::run(sub, cfg, out_dir, opts, std::cout);
        return rec.ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
