#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cldp/ldp_harness.hpp"
#include "cldp/m1_metric.hpp"
#include "doctest.h"

using namespace cldp;

namespace {

ExperimentConfig base_config() {
    ExperimentConfig c;
    c.lambda = 1.0;
    c.T = 50.0;
    c.eta = 0.8;
    c.seed = 7;
    c.n_reps = 2000;
    c.pbig_samples = 20000;
    return c;
}

// Zero offspring, deterministic unit marks, a few immigrants on average.
ExperimentConfig deterministic_config() {
    auto c = base_config();
    c.spec.x_law = TailLaw::deterministic(1.0);
    c.lambda = 0.005;
    c.T = 100.0;
    return c;
}

}  // namespace

TEST_CASE("estimate plumbing") {
    const auto e = make_estimate(0.3, 0.01, 100, "1/x");
    CHECK(e.ci_lo == doctest::Approx(0.3 - 0.0196));
    CHECK(e.ci_hi == doctest::Approx(0.3 + 0.0196));
    CHECK(parse_model("hawkes") == Model::hawkes);
    CHECK(to_string(Estimator::crude) == "crude");
    CHECK_THROWS_AS(parse_model("x"), ConfigError);

    auto c = base_config();
    CHECK_NOTHROW(c.validate());
    c.delta = 1.5;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("delta"), ConfigError);
    c = base_config();
    c.eta = 0.6;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("eta"), ConfigError);
    c = base_config();
    c.quantile_levels = {0.5};
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("quantile_levels"), ConfigError);
}

TEST_CASE("single replications") {
    auto c = base_config();
    c.lambda = 0.0;
    const auto cent = prepare_centering(c);
    Stream rng(1);
    const auto r = simulate_replication(c, cent, rng);
    CHECK(terminal(r.path) == 0.0);
    CHECK(path_sup(r.path) == 0.0);
    CHECK_FALSE(r.hit);

    // The hit flag matches the event recomputed on the serialized path.
    c = base_config();
    c.spec.k_param = 1.0;
    c.event = PathEvent::terminal_exceed(0.2);
    const auto cent2 = prepare_centering(c);
    int hits = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto rep = simulate_replication(c, cent2, rng);
        std::stringstream ss;
        write_path_csv(ss, rep.path);
        const auto back = read_path_csv(ss);
        CHECK(rep.hit == (terminal(back) > 0.2));
        hits += rep.hit;
        CHECK(evaluate(PathEvent::dk_proxy(0, 0.1), rep.path) == (kth_largest_jump(rep.path, 1) > 0.2));
    }
    CHECK(hits > 0);
    CHECK(hits < 1000);
}

TEST_CASE("crude estimator") {
    // The first jump is positive and beats the drift accumulated before it,
    // so sup > 0 exactly when at least one immigrant arrives.
    auto c = deterministic_config();
    c.event = PathEvent::sup_exceed(0.0);
    c.n_reps = 20000;
    const auto est = crude_estimate(c, prepare_centering(c), 2);
    const double p = -std::expm1(-c.lambda * c.T);
    CHECK(std::abs(est.value - p) < 3.0 * est.std_error);

    // Total mass is at most the immigrant count, far below c x_T.
    c.event = PathEvent::terminal_exceed(0.5);
    c.n_reps = 500;
    CHECK(crude_estimate(c, prepare_centering(c), 2).value == 0.0);

    // Doubling n_reps divides the standard error by about sqrt(2).
    auto m = base_config();
    m.event = PathEvent::terminal_exceed(0.5);
    const auto cm = prepare_centering(m);
    m.n_reps = 4000;
    const auto e1 = crude_estimate(m, cm, 2);
    m.n_reps = 8000;
    const auto e2 = crude_estimate(m, cm, 2);
    REQUIRE(e1.value > 0.0);
    CHECK(std::abs(e1.std_error / e2.std_error / std::sqrt(2.0) - 1.0) < 0.2);
}

TEST_CASE("splitting with aligned thresholds is exact") {
    // No offspring: D = X, so a jump above 2r x_T = delta x_T is exactly a
    // big cluster and the estimate is P(M >= k+1).
    auto c = base_config();
    c.T = 100.0;
    c.delta = 0.5;
    c.n_reps = 400;
    for (std::size_t k : {0u, 1u}) {
        c.k = k;
        c.event = PathEvent::dk_proxy(k, 0.25);
        const auto r = splitting_estimate(c, prepare_centering(c), 2);
        const double mu = c.lambda * c.T * tail_prob(c.spec.x_law, 0.5 * c.scaling().x_T());
        const double p0 = std::exp(-mu);
        const double expected = k == 0 ? 1.0 - p0 : 1.0 - p0 - mu * p0;
        CHECK(r.p_big.value == doctest::Approx(tail_prob(c.spec.x_law, r.big_threshold)).epsilon(1e-14));
        CHECK(r.estimate.value == doctest::Approx(expected).epsilon(1e-5));
        CHECK(r.estimate.std_error < 1e-12);
        CHECK(r.remainder_bound <= c.tail_tol);
        CHECK(r.strata.size() >= k + 3);
    }

    auto d = deterministic_config();
    d.event = PathEvent::terminal_exceed(0.5);
    CHECK_THROWS_AS(splitting_estimate(d, prepare_centering(d), 1), std::runtime_error);
}

TEST_CASE("crude and splitting agree") {
    struct Case {
        double nu;
        double T;
        PathEvent event;
        std::size_t k;
    };
    const Case cases[] = {{1.0, 50.0, PathEvent::terminal_exceed(1.5), 0},
                          {0.0, 100.0, PathEvent::sup_exceed(1.0), 0},
                          {2.0, 50.0, PathEvent::jump_count(2, 0.3), 1}};
    for (const auto& cs : cases) {
        auto c = base_config();
        c.spec.k_param = cs.nu;
        c.T = cs.T;
        c.event = cs.event;
        c.k = cs.k;
        const auto cent = prepare_centering(c);
        c.n_reps = 40000;
        const auto crude = crude_estimate(c, cent, 2);
        c.n_reps = 8000;
        const auto split = splitting_estimate(c, cent, 2).estimate;
        INFO(format_event(cs.event), " crude ", crude.value, " splitting ", split.value);
        REQUIRE(crude.value > 0.0);
        CHECK(std::abs(crude.value - split.value) <= 3.0 * std::hypot(crude.std_error, split.std_error));
    }
}

TEST_CASE("results do not depend on the worker count") {
    auto c = base_config();
    c.spec.k_param = 1.0;
    c.event = PathEvent::terminal_exceed(1.0);
    c.n_reps = 600;
    const auto cent = prepare_centering(c);
    const auto a = splitting_estimate(c, cent, 1);
    const auto b = splitting_estimate(c, cent, 3);
    CHECK(a.estimate.value == b.estimate.value);
    CHECK(a.estimate.std_error == b.estimate.std_error);
    CHECK(a.p_big.value == b.p_big.value);
    const auto x = crude_estimate(c, cent, 1);
    const auto y = crude_estimate(c, cent, 4);
    CHECK(x.value == y.value);

    auto h = base_config();
    h.model = Model::hawkes;
    h.spec.phi = 0.1;
    h.centering_mc = 2000;
    CHECK(prepare_centering(h).path == prepare_centering(h).path);
}

TEST_CASE("monotone proxy hierarchy") {
    auto c = base_config();
    c.spec.k_param = 2.0;
    c.n_reps = 3000;
    const auto cent = prepare_centering(c);
    for (double r : {0.05, 0.2, 0.5}) {
        double prev = 1.0;
        for (std::size_t k = 0; k < 3; ++k) {
            c.event = PathEvent::dk_proxy(k, r);
            const double p = crude_estimate(c, cent, 2).value;
            CHECK(p <= prev);
            prev = p;
        }
    }
}

TEST_CASE("admissibility and ratios") {
    CHECK(ldp_admissibility(PathEvent::terminal_exceed(1.0), 0).empty());
    CHECK(ldp_admissibility(PathEvent::value_at(0.5, 1.0), 0).empty());
    CHECK_FALSE(ldp_admissibility(PathEvent::terminal_exceed(1.0), 1).empty());
    CHECK_FALSE(ldp_admissibility(PathEvent::terminal_exceed(-1.0), 0).empty());
    CHECK(ldp_admissibility(PathEvent::jump_count(2, 0.5), 1).empty());
    CHECK_FALSE(ldp_admissibility(PathEvent::jump_count(1, 0.5), 1).empty());
    CHECK(ldp_admissibility(PathEvent::dk_proxy(2, 0.5), 2).empty());
    CHECK_FALSE(ldp_admissibility(PathEvent::dk_proxy(1, 0.5), 2).empty());

    auto c = base_config();
    c.k = 1;
    c.event = PathEvent::terminal_exceed(1.0);
    CHECK_THROWS_AS(ldp_ratio(c, 1), std::invalid_argument);

    // The limit value is linear in C, and the speed factor is exact.
    c = base_config();
    c.n_reps = 200;
    c.event = PathEvent::terminal_exceed(2.0);
    const auto r0 = ldp_ratio(c, 2);
    c.spec.k_param = 2.0;
    const auto r2 = ldp_ratio(c, 2);
    CHECK(r2.limit_value == doctest::Approx(3.0 * r0.limit_value).epsilon(1e-14));
    CHECK(r0.speed_factor == doctest::Approx(std::pow(c.scaling().x_T(), 1.5) / c.T).epsilon(1e-14));
    CHECK(r0.ratio.value == doctest::Approx(r0.speed_factor * r0.probability.value / r0.limit_value));
    c.event = PathEvent::terminal_exceed(4.0);
    CHECK(ldp_ratio(c, 2).limit_value == doctest::Approx(std::pow(2.0, -1.5) * r2.limit_value).epsilon(1e-14));
}

TEST_CASE("rank correlation") {
    CHECK(spearman_rank({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman_rank({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman_rank({1, 2, 3, 4, 5}, {1, 3, 2, 5, 4}) == doctest::Approx(0.8));
    CHECK(spearman_rank({1, 2, 3}, {1, 1, 2}) == doctest::Approx(std::sqrt(3.0) / 2.0));
}

TEST_CASE("waiting-time assumption") {
    WaitLaw e;
    const std::vector<double> grid{1e2, 1e3, 1e4, 1e5};
    const auto a = check_assumption6(e, 0.8, 0.1, grid);
    CHECK(a.holds);
    REQUIRE(a.rows.size() == 4);
    CHECK(a.rows[0].value == doctest::Approx(std::pow(100.0, 0.8) * std::exp(-10.0)));

    WaitLaw p;
    p.law = TailLaw::pareto(2.0, 1.0);
    CHECK(check_assumption6(p, 0.8, 0.1, grid).holds);

    WaitLaw v;
    v.law = TailLaw::pareto(0.5, 1.0);
    v.allow_infinite_mean = true;
    const auto bad = check_assumption6(v, 0.8, 0.1, grid);
    CHECK_FALSE(bad.holds);
    CHECK(bad.rows.back().value > bad.rows.front().value);
}

TEST_CASE("remainder beyond the horizon") {
    auto c = base_config();
    c.spec.dependence = Dependence::comonotone;
    c.spec.k_param = 1.0;
    c.wait.law = TailLaw::deterministic(0.0);
    c.T_grid = {50.0, 100.0};
    c.n_clusters = 20000;
    const auto zero = check_remainder(c, 2);
    for (const auto& r : zero.rows) CHECK(r.estimate == 0.0);

    c.wait.law = TailLaw::exponential(1.0);
    c.T_grid = {25.0, 50.0, 100.0, 200.0, 1000.0};
    c.n_clusters = 200000;
    const auto t = check_remainder(c, 2);
    REQUIRE(t.rows.size() == 5);
    CHECK(t.rows.back().estimate < 0.05);
    CHECK(t.spearman <= -0.9);
    for (const auto& r : t.rows) CHECK_FALSE(r.low_confidence);
}

TEST_CASE("tail equivalence without offspring") {
    auto c = base_config();
    c.n_clusters = 200000;
    c.quantile_levels = {0.99, 0.999};
    const auto t = check_tail_equivalence(c, 2);
    REQUIRE(t.rows.size() == 2);
    for (const auto& r : t.rows) {
        CHECK(r.ratio_K == 0.0);
        CHECK(r.ratio_D == doctest::Approx(1.0).epsilon(0.15));
        CHECK(r.predicted_mark == 1.0);
    }
}
