#include "cldp/functional_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace cldp {

double ScalingRule::x_T() const { return std::pow(T, eta); }

void ScalingRule::validate(double alpha) const {
    if (!(T > 0.0)) throw ConfigError("T_horizon: must be > 0");
    const double bound = std::max(alpha > 0.0 ? 1.0 / alpha : 0.0, 0.5);
    if (!(eta > bound)) {
        throw ConfigError("eta: must exceed max(1/alpha, 1/2) = " + std::to_string(bound) + ", got " +
                          std::to_string(eta));
    }
}

double speed(const TailLaw& mark_law, double x) { return 1.0 / tail_prob(mark_law, x); }

double speed_prime(const TailLaw& mark_law, const ScalingRule& scaling) {
    return speed(mark_law, scaling.x_T()) / scaling.T;
}

CadlagPath build_jump_path(std::vector<TimedMark>& events, double T) {
    std::sort(events.begin(), events.end(),
              [](const TimedMark& a, const TimedMark& b) { return a.time < b.time; });
    std::vector<PathNode> nodes;
    nodes.reserve(events.size() + 2);
    nodes.push_back({0.0, 0.0, 0.0});
    double level = 0.0;
    for (const auto& e : events) {
        if (e.time > T) break;
        const double t = e.time / T;
        if (t == nodes.back().t) {
            nodes.back().right += e.mark;
        } else {
            nodes.push_back({t, level, level + e.mark});
        }
        level = nodes.back().right;
    }
    if (nodes.back().t != 1.0) nodes.push_back({1.0, level, level});
    return CadlagPath(std::move(nodes));
}

CadlagPath build_uncentered(std::span<const Cluster> clusters, double T) {
    std::vector<TimedMark> events;
    for (const auto& c : clusters) {
        if (c.immigrant.gamma < 0.0 || c.immigrant.gamma > T) {
            throw std::invalid_argument("build_uncentered: immigrant outside [0,T]");
        }
        for (const auto& e : c.events) events.push_back({c.immigrant.gamma + e.offset, e.mark});
    }
    return build_jump_path(events, T);
}

namespace {

// Integrated CDF: int_0^s P(W <= v) dv.
double integrated_cdf(const TailLaw& w, double s) {
    if (s <= 0.0) return 0.0;
    switch (w.family) {
        case Family::deterministic: return std::max(0.0, s - w.scale);
        case Family::exponential: return s + w.scale * std::expm1(-s / w.scale);
        case Family::pareto: {
            const double xm = w.scale;
            if (s <= xm) return 0.0;
            const double a = w.alpha;
            const double tail_integral = std::abs(a - 1.0) < 1e-12
                                             ? xm * std::log(s / xm)
                                             : xm * (std::pow(s / xm, 1.0 - a) - 1.0) / (1.0 - a);
            return (s - xm) - tail_integral;
        }
    }
    return 0.0;
}

// x with P(X > x) = v. Parametrizing by the tail probability avoids the
// rounding of 1 - v to 1 near the endpoint.
double upper_quantile(const TailLaw& law, double v) {
    v = std::max(v, std::numeric_limits<double>::min());
    switch (law.family) {
        case Family::pareto: return law.scale * std::pow(v, -1.0 / law.alpha);
        case Family::exponential: return -law.scale * std::log(v);
        case Family::deterministic: return law.scale;
    }
    return law.scale;
}

// E[f(X)] over the whole law, by tanh-sinh in the probability variable.
template <class F>
double expect(const TailLaw& law, F f) {
    if (law.family == Family::deterministic) return f(law.scale);
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto g = [&](double v) { return f(upper_quantile(law, v)); };
    return integrator.integrate(g, 0.0, 1.0);
}

// E[f(X); X > x_c] via the probability variable on (0, P(X > x_c)).
template <class F>
double expect_tail(const TailLaw& law, double x_c, F f) {
    const double vc = tail_prob(law, x_c);
    if (vc <= 0.0) return 0.0;
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto g = [&](double v) { return f(upper_quantile(law, v)); };
    return integrator.integrate(g, 0.0, vc);
}

double density(const TailLaw& law, double x) {
    switch (law.family) {
        case Family::pareto: return x < law.scale ? 0.0 : law.alpha / law.scale * std::pow(x / law.scale, -law.alpha - 1.0);
        case Family::exponential: return x < 0.0 ? 0.0 : std::exp(-x / law.scale) / law.scale;
        case Family::deterministic: return 0.0;
    }
    return 0.0;
}

// E[ceil(eta X) g(X)] = eta E[X g(X)] + E[r(X) g(X)] with r = ceil(eta x) - eta x.
// The sawtooth part is integrated cell by cell up to eta x = k0 + kCells and
// replaced by its average 1/2 beyond.
template <class G>
double expect_ceil_times(const TailLaw& law, double eta, G g) {
    if (law.family == Family::deterministic) return std::ceil(eta * law.scale) * g(law.scale);
    const double smooth = eta * expect(law, [&](double x) { return x * g(x); });
    constexpr int kCells = 2000;
    const double lo = law.family == Family::pareto ? law.scale : 0.0;
    const double k_start = std::floor(eta * lo);
    const double x_cut = (k_start + kCells) / eta;
    double saw = 0.0;
    using GL = boost::math::quadrature::gauss<double, 16>;
    for (int c = 0; c < kCells; ++c) {
        const double a = std::max(lo, (k_start + c) / eta);
        const double b = (k_start + c + 1) / eta;
        if (b <= a) continue;
        const double k = k_start + c + 1;
        saw += GL::integrate([&](double x) { return (k - eta * x) * g(x) * density(law, x); }, a, b);
    }
    saw += 0.5 * expect_tail(law, x_cut, g);
    return smooth + saw;
}

}  // namespace

CadlagPath centering_mb(double lambda, double T, const JointMarkSpec& spec, const WaitLaw& wait,
                        std::size_t grid_n) {
    if (grid_n < 2) throw std::invalid_argument("centering_mb: grid_n must be >= 2");
    const double ex = mean(spec.x_law);
    std::vector<PathNode> nodes(grid_n + 1);
    const double mean_k = spec.mean_offspring();
    for (std::size_t i = 0; i <= grid_n; ++i) {
        const double t = i == grid_n ? 1.0 : static_cast<double>(i) / static_cast<double>(grid_n);
        const double s = t * T;
        double offspring = 0.0;
        if (mean_k > 0.0 && s > 0.0) {
            if (!wait.conditional_on_mark) {
                offspring = mean_k * integrated_cdf(wait.law, s);
            } else {
                auto g = [&](double x) { return integrated_cdf(wait.given_mark(x), s); };
                switch (spec.dependence) {
                    case Dependence::independent_light_k:
                    case Dependence::heavy_k_light_x: offspring = mean_k * expect(spec.x_law, g); break;
                    case Dependence::comonotone: offspring = expect_ceil_times(spec.x_law, spec.k_param, g); break;
                }
            }
        }
        const double m = lambda * ex * (s + offspring);
        nodes[i] = {t, m, m};
    }
    return CadlagPath(std::move(nodes));
}

HawkesCentering centering_hawkes(double lambda, double T, const JointMarkSpec& spec, const WaitLaw& wait,
                                 std::size_t n_mc, std::size_t grid_n, Stream& rng, std::size_t cap) {
    if (grid_n < 2) throw std::invalid_argument("centering_hawkes: grid_n must be >= 2");
    if (n_mc < 2) throw std::invalid_argument("centering_hawkes: n_mc must be >= 2");
    if (!(spec.mean_fertility() < 1.0)) throw ConfigError("phi: Hawkes spec is not subcritical (phi * E[X] >= 1)");

    const double ex = mean(spec.x_law);
    const auto G = static_cast<double>(grid_n);
    auto grid_s = [&](std::size_t i) { return (i == grid_n ? 1.0 : static_cast<double>(i) / G) * T; };

    // sum_j D_j (s - W_j)^+ = s * sum_{W_j < s} D_j - sum_{W_j < s} D_j W_j:
    // accumulate D_j and D_j W_j at the first grid index with s_i > W_j.
    std::vector<double> add_d(grid_n + 2, 0.0), add_dw(grid_n + 2, 0.0);

    // Per-cluster second moments on a coarse band grid (interpolated below).
    const std::size_t band_step = std::max<std::size_t>(1, grid_n / 64);
    std::vector<std::size_t> band_idx;
    for (std::size_t i = 0; i < grid_n; i += band_step) band_idx.push_back(i);
    band_idx.push_back(grid_n);
    std::vector<double> band_sq(band_idx.size(), 0.0);
    std::vector<double> f_band(band_idx.size(), 0.0);

    HawkesCentering out;
    for (std::size_t c = 0; c < n_mc; ++c) {
        Immigrant imm{0.0, sample(spec.x_law, rng)};
        Cluster cl = gen_hawkes_cluster(imm, spec, wait, cap, rng);
        if (cl.truncated) {
            ++out.n_truncated;
            continue;
        }
        ++out.n_clusters;
        if (cl.events.size() == 1) continue;
        const auto sub = subtree_totals(cl);
        std::fill(f_band.begin(), f_band.end(), 0.0);
        for (std::size_t j = 1; j < cl.events.size(); ++j) {
            if (cl.events[j].generation != 1) continue;
            const double w = cl.events[j].offset;
            const double d = sub[j];
            // First grid index with s_i > w.
            std::size_t i0 = static_cast<std::size_t>(std::floor(w / T * G)) + 1;
            if (w < 0.0) i0 = 0;
            if (i0 <= grid_n) {
                add_d[i0] += d;
                add_dw[i0] += d * w;
            }
            for (std::size_t b = 0; b < band_idx.size(); ++b) {
                f_band[b] += d * std::max(0.0, grid_s(band_idx[b]) - w);
            }
        }
        for (std::size_t b = 0; b < band_idx.size(); ++b) band_sq[b] += f_band[b] * f_band[b];
    }
    if (out.n_clusters < 2) throw std::runtime_error("centering_hawkes: too few untruncated clusters");

    const auto n = static_cast<double>(out.n_clusters);
    std::vector<PathNode> nodes(grid_n + 1);
    std::vector<double> mean_f(grid_n + 1);
    double cum_d = 0.0, cum_dw = 0.0;
    for (std::size_t i = 0; i <= grid_n; ++i) {
        cum_d += add_d[i];
        cum_dw += add_dw[i];
        const double s = grid_s(i);
        mean_f[i] = std::max(0.0, (s * cum_d - cum_dw) / n);
        const double m = lambda * (s * ex + mean_f[i]);
        nodes[i] = {s / T, m, m};
    }
    nodes.back().t = 1.0;
    out.path = CadlagPath(std::move(nodes));

    std::vector<double> band_se(band_idx.size());
    for (std::size_t b = 0; b < band_idx.size(); ++b) {
        const double mf = mean_f[band_idx[b]];
        const double var = std::max(0.0, (band_sq[b] / n - mf * mf) * n / (n - 1.0));
        band_se[b] = lambda * std::sqrt(var / n);
    }
    out.stderr_band.resize(grid_n + 1);
    for (std::size_t b = 0; b + 1 < band_idx.size(); ++b) {
        const std::size_t a = band_idx[b], z = band_idx[b + 1];
        for (std::size_t i = a; i <= z; ++i) {
            const double w = static_cast<double>(i - a) / static_cast<double>(z - a);
            out.stderr_band[i] = band_se[b] + w * (band_se[b + 1] - band_se[b]);
        }
    }
    return out;
}

CadlagPath combine_paths(const CadlagPath& a, const CadlagPath& b, double factor) {
    const auto na = a.nodes();
    const auto nb = b.nodes();
    std::vector<PathNode> out;
    out.reserve(na.size() + nb.size());
    std::size_t i = 0, j = 0;
    // Value on the open segment after node k of p, at time t.
    auto interp = [](std::span<const PathNode> p, std::size_t k, double t) {
        const auto& x = p[k];
        const auto& y = p[k + 1];
        return x.right + (t - x.t) / (y.t - x.t) * (y.left - x.right);
    };
    while (i < na.size() || j < nb.size()) {
        const double ta = i < na.size() ? na[i].t : INFINITY;
        const double tb = j < nb.size() ? nb[j].t : INFINITY;
        const double t = std::min(ta, tb);
        double al, ar, bl, br;
        if (ta == t) {
            al = na[i].left;
            ar = na[i].right;
        } else {
            al = ar = interp(na, i - 1, t);
        }
        if (tb == t) {
            bl = nb[j].left;
            br = nb[j].right;
        } else {
            bl = br = interp(nb, j - 1, t);
        }
        out.push_back({t, (al - bl) * factor, (ar - br) * factor});
        if (ta == t) ++i;
        if (tb == t) ++j;
    }
    return CadlagPath(std::move(out));
}

CadlagPath centered_scaled_path(const CadlagPath& uncentered, const CadlagPath& centering,
                                const ScalingRule& scaling) {
    return combine_paths(uncentered, centering, 1.0 / scaling.x_T());
}

}  // namespace cldp
