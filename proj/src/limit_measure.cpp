#include "cldp/limit_measure.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "cldp/rng.hpp"

namespace cldp {

std::string_view to_string(LimitModel m) {
    switch (m) {
        case LimitModel::mb_independent: return "mb_independent";
        case LimitModel::mb_comonotone: return "mb_comonotone";
        case LimitModel::mb_heavy_k: return "mb_heavy_k";
        case LimitModel::hawkes_comonotone: return "hawkes_comonotone";
    }
    return "?";
}

double LimitMeasure::truncated_mass() const { return constant * std::pow(y0, -alpha); }

LimitMeasure limit_measure_for(const JointMarkSpec& spec, bool hawkes) {
    spec.validate();
    if (spec.x_law.family != Family::pareto) throw ConfigError("family: limit measure needs a pareto mark law");
    LimitMeasure m;
    m.alpha = spec.x_law.alpha;
    m.y0 = spec.x_law.scale;
    const double ex = mean(spec.x_law);
    if (hawkes) {
        const double mf = spec.mean_fertility();
        m.model = LimitModel::hawkes_comonotone;
        m.constant = (1.0 / (1.0 - mf)) * std::pow(1.0 + spec.phi * ex / (1.0 - mf), m.alpha);
        return m;
    }
    switch (spec.dependence) {
        case Dependence::independent_light_k:
            m.model = LimitModel::mb_independent;
            m.constant = 1.0 + spec.k_param;
            break;
        case Dependence::comonotone:
            m.model = LimitModel::mb_comonotone;
            m.constant = std::pow(1.0 + spec.k_param * ex, m.alpha) + mean_ceil_scaled(spec.x_law, spec.k_param);
            break;
        case Dependence::heavy_k_light_x: {
            m.model = LimitModel::mb_heavy_k;
            if (spec.k_alpha < m.alpha) {
                throw ConfigError("k_alpha: offspring count tail heavier than the mark tail; no limit at the mark speed");
            }
            m.constant = 1.0 + spec.mean_offspring();
            if (spec.k_alpha == m.alpha) m.constant += std::pow(spec.k_param * ex / m.y0, m.alpha);
            break;
        }
    }
    return m;
}

double mu_tail(const LimitMeasure& m, double y) {
    if (!(y > 0.0)) throw std::domain_error("mu_tail: y must be > 0");
    return m.constant * std::pow(y, -m.alpha);
}

namespace {

using GL = boost::math::quadrature::gauss<double, 256>;

// H_j(c) = mu0^j(y_1 + ... + y_j > c) for mu restricted to [y0, inf).
double h_quad(const LimitMeasure& m, int j, double c) {
    const double a = m.alpha, C = m.constant, y0 = m.y0;
    const double M0 = m.truncated_mass();
    if (j == 1) return C * std::pow(std::max(c, y0), -a);
    const double U = c - (j - 1) * y0;
    if (U <= y0) return std::pow(M0, j);
    double total = std::pow(M0, j - 1) * C * std::pow(U, -a);
    const double mid = std::clamp(0.5 * c, y0, U);
    if (mid > y0) {
        auto lower = [&](double v) {
            const double y = std::exp(v);
            return h_quad(m, j - 1, c - y) * a * C * std::pow(y, -a);
        };
        total += GL::integrate(lower, std::log(y0), std::log(mid));
    }
    if (U > mid) {
        auto upper = [&](double w) {
            const double r = std::exp(w);
            return h_quad(m, j - 1, r) * a * C * std::pow(c - r, -a - 1.0) * r;
        };
        total += GL::integrate(upper, std::log((j - 1) * y0), std::log(c - mid));
    }
    return total;
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

// H_j(c) by Halton points with random shifts; returns value and standard error.
MeasureValue h_qmc(const LimitMeasure& m, int j, double c) {
    if (j > static_cast<int>(std::size(kPrimes))) throw std::invalid_argument("mu_bar_tail: k too large");
    constexpr int kShifts = 16;
    constexpr std::uint64_t kPoints = 1u << 15;
    const double M0 = m.truncated_mass();
    Stream rng(derive_seed(label_hash("mu_bar_qmc"), {static_cast<std::uint64_t>(j)}));
    std::vector<double> est(kShifts);
    std::vector<double> shift(j);
    for (int s = 0; s < kShifts; ++s) {
        for (auto& v : shift) v = rng.uniform();
        std::uint64_t hits = 0;
        for (std::uint64_t i = 1; i <= kPoints; ++i) {
            double sum = 0.0;
            for (int d = 0; d < j; ++d) {
                double u = radical_inverse(i, kPrimes[d]) + shift[d];
                if (u >= 1.0) u -= 1.0;
                sum += m.y0 * std::pow(1.0 - u, -1.0 / m.alpha);
            }
            hits += sum > c;
        }
        est[s] = static_cast<double>(hits) / static_cast<double>(kPoints);
    }
    double mean_v = 0.0;
    for (double v : est) mean_v += v / kShifts;
    double var = 0.0;
    for (double v : est) var += (v - mean_v) * (v - mean_v) / (kShifts - 1);
    const double scale = std::pow(M0, j);
    return {mean_v * scale, std::sqrt(var / kShifts) * scale};
}

MeasureValue h_any(const LimitMeasure& m, int j, double c) {
    if (j <= 3) return {h_quad(m, j, c), 0.0};
    return h_qmc(m, j, c);
}

double factorial(int n) { return std::tgamma(n + 1.0); }

double binom(int n, int k) { return std::round(factorial(n) / (factorial(k) * factorial(n - k))); }

}  // namespace

MeasureValue mu_bar_tail_detailed(const LimitMeasure& m, double lambda, std::size_t k, double c) {
    if (!(c > 0.0)) throw std::domain_error("mu_bar_tail: c must be > 0");
    if (k == 0) return {lambda * mu_tail(m, c), 0.0};
    const int j = static_cast<int>(k) + 1;
    const double pre = std::pow(lambda, j) / factorial(j);
    const auto h = h_any(m, j, c);
    return {pre * h.value, pre * h.error};
}

double mu_bar_tail(const LimitMeasure& m, double lambda, std::size_t k, double c) {
    return mu_bar_tail_detailed(m, lambda, k, c).value;
}

double mu_sharp(const LimitMeasure& m, double lambda, std::size_t k, const PathEvent& event) {
    event.validate();
    const int n = static_cast<int>(k) + 1;
    const double pre = std::pow(lambda, n) / factorial(n);
    const double M0 = m.truncated_mass();
    switch (event.kind) {
        case EventKind::terminal_exceed:
        case EventKind::sup_exceed:
            // Limit paths are nondecreasing pure-jump paths, so sup = terminal.
            return mu_bar_tail(m, lambda, k, event.level);
        case EventKind::value_at: {
            const double s = event.s;
            const double c = event.level;
            if (c <= 0.0) throw std::invalid_argument("mu_sharp: value_at needs c > 0");
            if (k == 0) return s * lambda * mu_tail(m, c);
            double total = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double w = binom(n, j) * std::pow(s, j) * std::pow(1.0 - s, n - j);
                if (w == 0.0) continue;
                total += w * h_any(m, j, c).value * std::pow(M0, n - j);
            }
            return pre * total;
        }
        case EventKind::jump_count:
        case EventKind::dk_proxy: {
            const int need = event.kind == EventKind::jump_count ? static_cast<int>(event.count)
                                                                  : static_cast<int>(event.count) + 1;
            const double r = event.kind == EventKind::jump_count ? event.level : 2.0 * event.level;
            if (need > n) return 0.0;
            const double big = mu_tail(m, r);
            if (need == n) return pre * std::pow(big, n);
            const double bt = m.constant * std::pow(std::max(r, m.y0), -m.alpha);
            const double small = M0 - bt;
            double total = 0.0;
            for (int j = need; j <= n; ++j) total += binom(n, j) * std::pow(bt, j) * std::pow(small, n - j);
            return pre * total;
        }
    }
    return 0.0;
}

}  // namespace cldp
