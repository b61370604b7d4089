#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cldp/functional_path.hpp"
#include "doctest.h"

using namespace cldp;
using boost::math::quadrature::gauss_kronrod;

namespace {

Cluster make_cluster(double gamma, std::vector<std::pair<double, double>> offset_mark) {
    Cluster c;
    c.immigrant = {gamma, offset_mark.front().second};
    std::uint32_t gen = 0;
    for (const auto& [o, x] : offset_mark) {
        c.events.push_back({o, x, gen, 0});
        gen = 1;
    }
    return c;
}

// Integral of the waiting-time CDF over [0, s] by adaptive quadrature.
double cdf_integral(const TailLaw& w, double s) {
    if (s <= 0.0) return 0.0;
    auto F = [&](double u) { return 1.0 - tail_prob(w, u); };
    if (w.family != Family::exponential) {
        if (s <= w.scale) return 0.0;
        return gauss_kronrod<double, 61>::integrate(F, w.scale, s, 15, 1e-13);
    }
    return gauss_kronrod<double, 61>::integrate(F, 0.0, s, 15, 1e-13);
}

}  // namespace

TEST_CASE("scaling and speed") {
    ScalingRule r{0.8, 100.0};
    CHECK(r.x_T() == doctest::Approx(std::pow(100.0, 0.8)));
    CHECK_NOTHROW(r.validate(1.5));
    CHECK_THROWS_AS(ScalingRule({0.6, 100.0}).validate(1.5), ConfigError);
    CHECK_THROWS_AS(ScalingRule({0.5, 100.0}).validate(0.0), ConfigError);
    const auto law = TailLaw::pareto(1.5, 1.0);
    CHECK(speed(law, 4.0) == doctest::Approx(8.0));
    CHECK(speed_prime(law, r) == doctest::Approx(std::pow(r.x_T(), 1.5) / 100.0));
}

TEST_CASE("uncentered path examples") {
    std::vector<Cluster> none;
    const auto zero = build_uncentered(none, 10.0);
    CHECK(zero.size() == 2);
    CHECK(terminal(zero) == 0.0);

    std::vector<Cluster> cs{make_cluster(2.0, {{0.0, 1.0}, {3.0, 2.0}, {9.0, 5.0}})};
    const auto p = build_uncentered(cs, 10.0);
    CHECK(path_value(p, 0.1) == 0.0);
    CHECK(path_value(p, 0.2) == 1.0);
    CHECK(left_limit(p, 0.5) == 1.0);
    CHECK(path_value(p, 0.5) == 3.0);
    CHECK(terminal(p) == 3.0);  // the event at 11 lies beyond the horizon

    // Ties merge into one jump.
    cs.push_back(make_cluster(5.0, {{0.0, 4.0}}));
    const auto q = build_uncentered(cs, 10.0);
    CHECK(jumps(q).size() == 2);
    CHECK(path_value(q, 0.5) == 7.0);

    std::vector<Cluster> late{make_cluster(11.0, {{0.0, 1.0}})};
    CHECK_THROWS_AS(build_uncentered(late, 10.0), std::invalid_argument);
}

TEST_CASE("uncentered terminal equals retained mass") {
    Stream rng(10);
    JointMarkSpec spec;
    spec.phi = 0.2;
    WaitLaw wait;
    for (int rep = 0; rep < 200; ++rep) {
        const double T = 20.0;
        const auto imms = sample_immigrants(1.0, T, spec.x_law, rng);
        std::vector<Cluster> cs;
        double retained = 0.0;
        for (const auto& i : imms) {
            cs.push_back(gen_hawkes_cluster(i, spec, wait, kDefaultClusterCap, rng));
            retained += split_at_horizon(cs.back(), T).retained_sum;
        }
        const auto p = build_uncentered(cs, T);
        CHECK(terminal(p) == doctest::Approx(retained).epsilon(1e-12));
        double jsum = 0.0;
        for (const auto& j : jumps(p)) {
            CHECK(j.size > 0.0);
            jsum += j.size;
        }
        CHECK(jsum == doctest::Approx(retained).epsilon(1e-12));
        // Right-continuity at every node.
        for (const auto& n : p.nodes()) CHECK(path_value(p, n.t) == n.right);
    }
}

TEST_CASE("mixed Binomial centering against quadrature") {
    const double lambda = 1.5, T = 40.0;
    for (const auto& w : {TailLaw::exponential(2.0), TailLaw::pareto(2.0, 1.0), TailLaw::pareto(1.0, 0.5),
                          TailLaw::deterministic(3.0)}) {
        JointMarkSpec spec;
        spec.k_param = 2.0;
        WaitLaw wait;
        wait.law = w;
        wait.allow_infinite_mean = true;
        const auto m = centering_mb(lambda, T, spec, wait, 256);
        CHECK(m.size() == 257);
        const double ex = mean(spec.x_law);
        for (std::size_t i = 0; i <= 256; i += 8) {
            const double t = i / 256.0;
            const double expected = lambda * ex * (t * T + 2.0 * cdf_integral(w, t * T));
            CHECK(path_value(m, t) == doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("mark-dependent waiting times") {
    const double lambda = 1.0, T = 5.0;
    WaitLaw wait;
    wait.law = TailLaw::exponential(4.0);
    wait.conditional_on_mark = true;

    JointMarkSpec ind;
    ind.x_law = TailLaw::pareto(1.5, 1.0);
    ind.k_param = 2.0;
    const auto m = centering_mb(lambda, T, ind, wait, 64);
    // Oracle: E over X of int_0^s (1 - exp(-u (1 + X) / 4)) du, integrating
    // against the Pareto density in x.
    auto inner = [](double x, double s) {
        const double r = (1.0 + x) / 4.0;
        return s - (1.0 - std::exp(-r * s)) / r;
    };
    for (double t : {0.25, 0.5, 1.0}) {
        const double s = t * T;
        auto integrand = [&](double x) { return inner(x, s) * 1.5 * std::pow(x, -2.5); };
        const double ei = gauss_kronrod<double, 61>::integrate(integrand, 1.0, INFINITY, 20, 1e-12);
        const double expected = lambda * 3.0 * (s + 2.0 * ei);
        CHECK(path_value(m, t) == doctest::Approx(expected).epsilon(1e-7));
    }

    // Comonotone K = ceil(X): Monte Carlo oracle with finite-variance marks.
    JointMarkSpec co;
    co.x_law = TailLaw::pareto(3.5, 1.0);
    co.dependence = Dependence::comonotone;
    co.k_param = 1.0;
    const auto mc = centering_mb(lambda, T, co, wait, 64);
    Stream rng(11);
    const int n = 2'000'000;
    const double s = T;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = sample(co.x_law, rng);
        const double v = std::ceil(x) * inner(x, s);
        sum += v;
        sum2 += v * v;
    }
    const double mean_v = sum / n;
    const double se = std::sqrt((sum2 / n - mean_v * mean_v) / n);
    const double ex = 3.5 / 2.5;
    CHECK(std::abs(terminal(mc) - lambda * ex * (s + mean_v)) < 4.0 * lambda * ex * se);
}

TEST_CASE("Hawkes centering") {
    const double lambda = 2.0, T = 30.0;
    WaitLaw wait;  // exponential, mean 1
    Stream rng(12);

    JointMarkSpec none;
    const auto h0 = centering_hawkes(lambda, T, none, wait, 100, 32, rng);
    for (const auto& node : h0.path.nodes()) {
        CHECK(node.right == doctest::Approx(lambda * 3.0 * node.t * T).epsilon(1e-13));
    }
    for (double b : h0.stderr_band) CHECK(b == 0.0);

    // Oracle: the first generation has mean size m = phi E[X], each subtree
    // has mean total E[X] / (1 - m) and enters at an exponential(1) wait, so
    // E[sum_j D_j (s - W_j)^+] = m E[X] / (1 - m) (s - 1 + e^{-s}).
    JointMarkSpec spec;
    spec.x_law = TailLaw::pareto(2.5, 1.0);
    spec.phi = 0.3;
    const double ex = 2.5 / 1.5, mf = 0.3 * ex;
    const auto h = centering_hawkes(lambda, T, spec, wait, 400000, 64, rng);
    CHECK(h.n_truncated == 0);
    CHECK(h.n_clusters == 400000);
    int outside = 0;
    for (std::size_t i = 0; i <= 64; ++i) {
        const double t = i / 64.0, s = t * T;
        const double expected = lambda * (s * ex + mf * ex / (1.0 - mf) * (s + std::expm1(-s)));
        const double got = path_value(h.path, t);
        outside += std::abs(got - expected) > 4.0 * h.stderr_band[i] + 1e-12;
    }
    CHECK(outside <= 1);

    JointMarkSpec super;
    super.phi = 0.4;
    CHECK_THROWS_AS(centering_hawkes(lambda, T, super, wait, 100, 32, rng), ConfigError);
}

TEST_CASE("combined paths") {
    Stream rng(13);
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<TimedMark> ev;
        const int n = static_cast<int>(rng.uniform() * 8);
        for (int i = 0; i < n; ++i) ev.push_back({rng.uniform() * 12.0, rng.uniform() * 3.0});
        const auto a = build_jump_path(ev, 10.0);
        std::vector<PathNode> nodes;
        const int g = 2 + static_cast<int>(rng.uniform() * 10);
        for (int i = 0; i <= g; ++i) {
            const double v = rng.uniform() * 5.0;
            nodes.push_back({static_cast<double>(i) / g, v, v});
        }
        const CadlagPath b(std::move(nodes));
        const double f = 0.1 + rng.uniform();
        const auto c = combine_paths(a, b, f);
        for (int i = 0; i <= 100; ++i) {
            const double t = i / 100.0;
            CHECK(path_value(c, t) == doctest::Approx(f * (path_value(a, t) - path_value(b, t))).epsilon(1e-12));
            CHECK(left_limit(c, t) == doctest::Approx(f * (left_limit(a, t) - left_limit(b, t))).epsilon(1e-12));
        }
        // A continuous centering leaves the jumps of the scaled path equal to marks / x_T.
        const ScalingRule sr{0.8, 10.0};
        const auto z = centered_scaled_path(a, b, sr);
        const auto ja = jumps(a), jz = jumps(z);
        REQUIRE(ja.size() == jz.size());
        for (std::size_t i = 0; i < ja.size(); ++i) {
            CHECK(jz[i].t == ja[i].t);
            CHECK(jz[i].size == doctest::Approx(ja[i].size / sr.x_T()).epsilon(1e-12));
        }
        // Sup is attained at a node: compare with a dense grid.
        double dense = -INFINITY;
        for (int i = 0; i <= 2000; ++i) dense = std::max(dense, path_value(z, i / 2000.0));
        CHECK(path_sup(z) >= dense - 1e-12);
    }
}

TEST_CASE("centered path identities") {
    std::vector<TimedMark> ev{{0.5, 2.0}, {0.75, 1.0}};
    const auto u = build_jump_path(ev, 1.0);
    const CadlagPath zero;
    CHECK(centered_scaled_path(u, zero, ScalingRule{0.8, 1.0}) == u);
    const auto diff = centered_scaled_path(u, u, ScalingRule{0.8, 7.0});
    for (const auto& n : diff.nodes()) {
        CHECK(n.left == 0.0);
        CHECK(n.right == 0.0);
    }

    JointMarkSpec spec;
    spec.k_param = 1.0;
    WaitLaw wait;
    const double T = 50.0;
    const auto m = centering_mb(2.0, T, spec, wait, 128);
    CHECK(path_value(m, 0.0) == 0.0);
    for (std::size_t i = 1; i < m.size(); ++i) CHECK(m.nodes()[i].right >= m.nodes()[i - 1].right);

    std::vector<TimedMark> big{{3.0, 40.0}, {20.0, 5.0}, {44.0, 90.0}};
    const auto ub = build_jump_path(big, T);
    // x_T(T, eta) doubles when T is scaled by 2^{1/eta}.
    const ScalingRule a{0.8, T}, b{0.8, T * std::pow(2.0, 1.0 / 0.8)};
    const auto za = centered_scaled_path(ub, m, a), zb = centered_scaled_path(ub, m, b);
    REQUIRE(za.size() == zb.size());
    for (std::size_t i = 0; i < za.size(); ++i) {
        CHECK(zb.nodes()[i].right == doctest::Approx(0.5 * za.nodes()[i].right).epsilon(1e-14));
    }
}
