#include <algorithm>
#include <cmath>
#include <vector>

#include "cldp/functional_path.hpp"
#include "cldp/m1_metric.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cldp;

namespace {

CadlagPath jump_path(std::vector<std::pair<double, double>> time_size) {
    std::vector<PathNode> nodes{{0.0, 0.0, 0.0}};
    double level = 0.0;
    for (const auto& [t, a] : time_size) {
        nodes.push_back({t, level, level + a});
        level += a;
    }
    nodes.push_back({1.0, level, level});
    return CadlagPath(std::move(nodes));
}

double uniform_distance(const CadlagPath& a, const CadlagPath& b) {
    const auto d = combine_paths(a, b, 1.0);
    return std::max(path_sup(d), -path_inf(d));
}

}  // namespace

TEST_CASE("completed graph") {
    const CadlagPath cont({{0.0, 0.0, 0.0}, {0.3, 1.0, 1.0}, {1.0, -2.0, -2.0}});
    const auto g = completed_graph(cont);
    REQUIRE(g.vertices.size() == 3);
    CHECK(g.vertices[1].t == 0.3);
    CHECK(g.vertices[1].z == 1.0);

    const auto j = completed_graph(jump_path({{0.5, 3.0}}));
    REQUIRE(j.vertices.size() == 4);
    const double expected[4][2] = {{0, 0}, {0.5, 0}, {0.5, 3}, {1, 3}};
    for (int i = 0; i < 4; ++i) {
        CHECK(j.vertices[i].t == expected[i][0]);
        CHECK(j.vertices[i].z == expected[i][1]);
    }

    Stream rng(20);
    for (int i = 0; i < 1000; ++i) {
        const auto p = i % 2 ? oracle::random_step_path(rng, 6, 3.0) : oracle::random_drift_path(rng, 6, 2.0);
        CHECK(completed_graph(p).vertices.size() == p.size() + jumps(p).size());
        const auto rep = parametric_rep(completed_graph(p));
        CHECK(rep.breakpoints.front().s == 0.0);
        CHECK(rep.breakpoints.back().s == 1.0);
        for (std::size_t k = 1; k < rep.breakpoints.size(); ++k) {
            CHECK(rep.breakpoints[k].s >= rep.breakpoints[k - 1].s);
            CHECK(rep.breakpoints[k].t >= rep.breakpoints[k - 1].t);
        }
        const auto mid = evaluate(rep, 0.5);
        CHECK((mid.t >= 0.0 && mid.t <= 1.0));
    }
}

TEST_CASE("distance examples") {
    const auto a = jump_path({{0.5, 1.0}});
    const auto b = jump_path({{0.5, 2.0}});
    CHECK(m1_distance(a, a).value == 0.0);
    CHECK(m1_distance(a, b).value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(oracle::brute_m1(a, b, 0.005) == doctest::Approx(1.0).epsilon(0.006));

    const double d = 0.05;
    const auto two = jump_path({{0.3, 1.0}, {0.3 + d, 1.0}});
    const auto one = jump_path({{0.3, 2.0}});
    const auto r = m1_distance(two, one);
    CHECK(r.value <= d + 1e-9);
    CHECK(std::abs(r.value - oracle::brute_m1(two, one, 0.002)) <= 0.002);

    CHECK_THROWS_AS(m1_distance(a, b, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(m1_distance(a, b, -1.0), std::invalid_argument);

    const auto flat = CadlagPath();
    const CadlagPath lifted({{0.0, 0.7, 0.7}, {1.0, 0.7, 0.7}});
    CHECK(m1_distance(flat, lifted).value == doctest::Approx(0.7));
}

TEST_CASE("agreement with the brute-force oracle") {
    Stream rng(21);
    const double h = 0.01;
    for (int i = 0; i < 60; ++i) {
        const auto p = oracle::random_step_path(rng, 4, 1.5);
        const auto q = oracle::random_step_path(rng, 4, 1.5);
        const auto r = m1_distance(p, q);
        CHECK(r.hi - r.lo <= 1e-9);
        CHECK(std::abs(r.value - oracle::brute_m1(p, q, h)) <= std::max(1e-9, h));
    }
    // Time shifts of a single jump.
    for (double t1 : {0.42, 0.5, 0.65, 0.9}) {
        const auto p = jump_path({{0.4, 1.0}});
        const auto q = jump_path({{t1, 1.0}});
        CHECK(std::abs(m1_distance(p, q).value - oracle::brute_m1(p, q, 0.002)) <= 0.002);
    }
}

TEST_CASE("metric axioms and dominance") {
    Stream rng(22);
    const double tol = 1e-9;
    for (int i = 0; i < 1000; ++i) {
        const auto a = oracle::random_step_path(rng, 5, 2.0);
        const auto b = oracle::random_step_path(rng, 5, 2.0);
        const auto c = oracle::random_drift_path(rng, 5, 1.0);
        const double ab = m1_distance(a, b, tol).value;
        const double ba = m1_distance(b, a, tol).value;
        const double bc = m1_distance(b, c, tol).value;
        const double ac = m1_distance(a, c, tol).value;
        CHECK(std::abs(ab - ba) <= tol);
        CHECK(m1_distance(a, a, tol).value <= tol);
        CHECK(ac <= ab + bc + 2 * tol);
        CHECK(ab <= uniform_distance(a, b) + tol);
        CHECK(ac <= uniform_distance(a, c) + tol);
    }
}

TEST_CASE("jump order statistics") {
    const auto p = jump_path({{0.2, 3.0}, {0.5, 1.0}, {0.8, 2.0}});
    CHECK(kth_largest_jump(p, 1) == 3.0);
    CHECK(kth_largest_jump(p, 2) == 2.0);
    CHECK(kth_largest_jump(p, 4) == 0.0);
    CHECK_THROWS_AS(kth_largest_jump(p, 0), std::invalid_argument);
    const CadlagPath cont({{0.0, 0.0, 0.0}, {1.0, 5.0, 5.0}});
    CHECK(kth_largest_jump(cont, 1) == 0.0);

    const auto sk = dk_skeleton(p, 1);
    const auto js = jumps(sk);
    REQUIRE(js.size() == 2);
    CHECK(js[0].t == 0.2);
    CHECK(js[0].size == 3.0);
    CHECK(js[1].t == 0.8);
    CHECK(js[1].size == 2.0);
    const auto single = jump_path({{0.4, 2.5}});
    CHECK(dk_skeleton(single, 0) == single);
    const auto tie = dk_skeleton(jump_path({{0.3, 1.0}, {0.6, 1.0}}), 0);
    REQUIRE(jumps(tie).size() == 1);
    CHECK(jumps(tie)[0].t == 0.3);

    CHECK_FALSE(exceeds_dk_proxy(cont, 0, 0.1));
    CHECK(exceeds_dk_proxy(jump_path({{0.5, 5.0}}), 0, 2.0));
    CHECK_FALSE(exceeds_dk_proxy(jump_path({{0.5, 5.0}}), 1, 2.0));
    CHECK_THROWS_AS(exceeds_dk_proxy(p, 0, 0.0), std::invalid_argument);

    Stream rng(23);
    for (int i = 0; i < 1000; ++i) {
        const double drift = 1.5 * rng.uniform();
        const auto q = oracle::random_drift_path(rng, 6, drift);
        const auto qj = jumps(q);
        double largest = 0.0;
        for (const auto& j : qj) largest = std::max(largest, std::abs(j.size));
        CHECK(kth_largest_jump(q, 1) == largest);

        const std::size_t k = i % 3;
        std::vector<double> sizes;
        for (const auto& j : qj) sizes.push_back(std::abs(j.size));
        std::sort(sizes.rbegin(), sizes.rend());
        double dropped = 0.0;
        for (std::size_t m = k + 1; m < sizes.size(); ++m) dropped += sizes[m];
        const double ub = dk_distance_upper_bound(q, k);
        CHECK(ub <= dropped + drift + 1e-9);
        const double r = 0.2 + rng.uniform();
        if (exceeds_dk_proxy(q, k, r)) CHECK(ub > 0.0);
    }
}
