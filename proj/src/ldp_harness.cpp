#include "cldp/ldp_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "cldp/m1_metric.hpp"
#include "cldp/parallel.hpp"
#include "cldp/rng.hpp"

namespace cldp {

std::string_view to_string(Model m) { return m == Model::mb ? "mb" : "hawkes"; }

Model parse_model(std::string_view s) {
    if (s == "mb") return Model::mb;
    if (s == "hawkes") return Model::hawkes;
    throw ConfigError("model: expected mb or hawkes, got '" + std::string(s) + "'");
}

std::string_view to_string(Estimator e) { return e == Estimator::crude ? "crude" : "splitting"; }

Estimator parse_estimator(std::string_view s) {
    if (s == "crude") return Estimator::crude;
    if (s == "splitting") return Estimator::splitting;
    throw ConfigError("estimator: expected crude or splitting, got '" + std::string(s) + "'");
}

void ExperimentConfig::validate() const {
    if (!(lambda >= 0.0 && std::isfinite(lambda))) throw ConfigError("lambda_rate: must be finite and >= 0");
    if (!(T > 0.0 && std::isfinite(T))) throw ConfigError("T_horizon: must be finite and > 0");
    spec.validate();
    wait.validate();
    scaling().validate(spec.x_law.heavy() ? spec.x_law.alpha : 0.0);
    if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta: must lie in (0, 1]");
    if (n_reps < 1) throw ConfigError("n_reps: must be >= 1");
    try {
        event.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (grid_n < 2) throw ConfigError("grid_n: must be >= 2");
    if (centering_mc < 2) throw ConfigError("centering_mc: must be >= 2");
    if (cap < 1) throw ConfigError("cap: must be >= 1");
    if (pbig_samples < 1) throw ConfigError("pbig_samples: must be >= 1");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw ConfigError("tail_tol: must lie in (0, 1)");
    if (!(y > 0.0)) throw ConfigError("y: must be > 0");
    if (!(c > 0.0)) throw ConfigError("c: must be > 0");
    if (T_grid.empty()) throw ConfigError("T_grid: must not be empty");
    for (std::size_t i = 0; i < T_grid.size(); ++i) {
        if (!(T_grid[i] > 0.0) || (i > 0 && !(T_grid[i] > T_grid[i - 1]))) {
            throw ConfigError("T_grid: must be positive and strictly increasing");
        }
    }
    if (!(epsilon > 0.0)) throw ConfigError("epsilon: must be > 0");
    for (double q : quantile_levels) {
        if (!(q > 0.9 && q < 1.0)) throw ConfigError("quantile_levels: every level must lie in (0.9, 1)");
    }
    if (n_clusters < 1) throw ConfigError("n_clusters: must be >= 1");
}

Estimate make_estimate(double value, double std_error, std::size_t n, std::string lineage) {
    return {value, std_error, n, value - 1.96 * std_error, value + 1.96 * std_error, std::move(lineage)};
}

CenteringCurve prepare_centering(const ExperimentConfig& config) {
    CenteringCurve out;
    if (config.model == Model::mb) {
        out.path = centering_mb(config.lambda, config.T, config.spec, config.wait, config.grid_n);
        return out;
    }
    Stream rng(derive_seed(config.seed, {label_hash("centering")}));
    auto h = centering_hawkes(config.lambda, config.T, config.spec, config.wait, config.centering_mc, config.grid_n,
                              rng, config.cap);
    out.path = std::move(h.path);
    out.stderr_band = std::move(h.stderr_band);
    out.n_truncated = h.n_truncated;
    return out;
}

Cluster generate_cluster(const ExperimentConfig& config, const Immigrant& imm, Stream& rng) {
    if (config.model == Model::mb) return gen_mb_cluster(imm, config.spec, config.wait, rng);
    return gen_hawkes_cluster(imm, config.spec, config.wait, config.cap, rng);
}

Replication simulate_replication(const ExperimentConfig& config, const CenteringCurve& centering, Stream& rng) {
    const auto imms = sample_immigrants(config.lambda, config.T, config.spec.x_law, rng);
    std::vector<Cluster> clusters;
    clusters.reserve(imms.size());
    for (const auto& imm : imms) clusters.push_back(generate_cluster(config, imm, rng));
    const auto uncentered = build_uncentered(clusters, config.T);
    Replication r;
    r.path = centered_scaled_path(uncentered, centering.path, config.scaling());
    r.hit = evaluate(config.event, r.path);
    return r;
}

namespace {

std::string lineage(std::uint64_t seed, std::string_view label) {
    return std::to_string(seed) + "/" + std::string(label);
}

// Runs fn(block, begin, end) over fixed blocks of [0, n); block b draws from
// derive_seed(seed, {label, b}) so results do not depend on the worker count.
template <class Fn>
void for_blocks(std::size_t n, std::size_t block, unsigned workers, Fn&& fn) {
    const std::size_t nb = (n + block - 1) / block;
    parallel_for(nb, workers, [&](std::size_t b) { fn(b, b * block, std::min(n, (b + 1) * block)); });
}

constexpr std::size_t kBlock = 4096;

}  // namespace

Estimate crude_estimate(const ExperimentConfig& config, const CenteringCurve& centering, unsigned workers) {
    const std::size_t n = config.n_reps;
    std::vector<unsigned char> hit(n, 0);
    const auto tag = label_hash("crude");
    parallel_for(n, workers, [&](std::size_t i) {
        Stream rng(derive_seed(config.seed, {tag, i}));
        hit[i] = simulate_replication(config, centering, rng).hit ? 1 : 0;
    });
    const double hits = static_cast<double>(std::accumulate(hit.begin(), hit.end(), std::size_t{0}));
    const double p = hits / static_cast<double>(n);
    return make_estimate(p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n, lineage(config.seed, "crude"));
}

namespace {

constexpr std::size_t kMaxRejectionTries = 100'000'000;

// Cluster with D > b (big) or D <= b (small), by rejection.
Cluster sample_conditioned_cluster(const ExperimentConfig& config, double gamma, double b, bool big, Stream& rng) {
    for (std::size_t tries = 0; tries < kMaxRejectionTries; ++tries) {
        Immigrant imm{gamma, sample(config.spec.x_law, rng)};
        Cluster c = generate_cluster(config, imm, rng);
        if ((cluster_total(c) > b) == big) return c;
    }
    throw std::runtime_error("splitting: rejection sampler exceeded its try budget");
}

struct StratumRep {
    bool hit = false;
    HitRecord record;
};

StratumRep run_stratum_rep(const ExperimentConfig& config, const CenteringCurve& centering, std::size_t m,
                           double p_big, double b, bool want_record, double large_level, Stream& rng) {
    const double T = config.T;
    std::vector<Cluster> clusters;
    for (std::size_t j = 0; j < m; ++j) {
        const double gamma = rng.uniform() * T;
        clusters.push_back(sample_conditioned_cluster(config, gamma, b, true, rng));
    }
    const std::uint64_t n_small = rng.poisson(config.lambda * T * (1.0 - p_big));
    for (std::uint64_t j = 0; j < n_small; ++j) {
        const double gamma = rng.uniform() * T;
        clusters.push_back(sample_conditioned_cluster(config, gamma, b, false, rng));
    }
    const auto uncentered = build_uncentered(clusters, T);
    const auto path = centered_scaled_path(uncentered, centering.path, config.scaling());
    StratumRep out;
    out.hit = evaluate(config.event, path);
    if (out.hit && want_record) {
        auto js = jumps(path);
        std::stable_sort(js.begin(), js.end(),
                         [](const Jump& x, const Jump& y) { return std::abs(x.size) > std::abs(y.size); });
        const std::size_t top = std::min(js.size(), config.k + 1);
        double top_sum = 0.0, tmin = 1.0, tmax = 0.0;
        for (std::size_t i = 0; i < top; ++i) {
            top_sum += js[i].size;
            tmin = std::min(tmin, js[i].t);
            tmax = std::max(tmax, js[i].t);
        }
        auto& r = out.record;
        r.m = m;
        const double x_T = config.scaling().x_T();
        const double total = terminal(uncentered);
        r.top_share_total = total > 0.0 ? top_sum * x_T / total : 0.0;
        const double excess = terminal(path);
        r.top_share_excess = excess != 0.0 ? top_sum / excess : 0.0;
        r.n_large = static_cast<std::size_t>(
            std::count_if(js.begin(), js.end(), [&](const Jump& j) { return std::abs(j.size) > large_level; }));
        r.time_spread = top > 0 ? tmax - tmin : 0.0;
    }
    return out;
}

double poisson_pmf(std::size_t m, double mu) {
    if (mu == 0.0) return m == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(m) * std::log(mu) - mu - std::lgamma(static_cast<double>(m) + 1.0));
}

// P(M > m) for M ~ Poisson(mu).
double poisson_upper(std::size_t m, double mu) {
    if (mu == 0.0) return 0.0;
    return boost::math::gamma_p(static_cast<double>(m) + 1.0, mu);
}

}  // namespace

SplittingResult splitting_estimate(const ExperimentConfig& config, const CenteringCurve& centering, unsigned workers,
                                   std::vector<HitRecord>* hits, double large_level) {
    SplittingResult res;
    const double x_T = config.scaling().x_T();
    const double b = config.delta * x_T;
    res.big_threshold = b;
    if (!(b > config.spec.x_law.scale) && config.spec.x_law.family != Family::exponential) {
        throw ConfigError("delta: delta * x_T must exceed the mark-law scale");
    }

    // P(D > b) with the control variate 1{X0 > b}, whose mean is known.
    const std::size_t n_p = config.pbig_samples;
    std::vector<unsigned char> y(n_p), z(n_p);
    const auto ptag = label_hash("pbig");
    for_blocks(n_p, kBlock, workers, [&](std::size_t blk, std::size_t lo, std::size_t hi) {
        Stream rng(derive_seed(config.seed, {ptag, blk}));
        for (std::size_t i = lo; i < hi; ++i) {
            Immigrant imm{0.0, sample(config.spec.x_law, rng)};
            const Cluster c = generate_cluster(config, imm, rng);
            y[i] = cluster_total(c) > b;
            z[i] = imm.mark > b;
        }
    });
    const double n_pd = static_cast<double>(n_p);
    double sy = 0, sz = 0, syz = 0;
    for (std::size_t i = 0; i < n_p; ++i) {
        sy += y[i];
        sz += z[i];
        syz += y[i] * z[i];
    }
    if (sy == 0.0) {
        throw std::runtime_error("splitting: no cluster exceeded delta * x_T while estimating P(D > delta x_T); "
                                 "refusing to extrapolate (raise pbig_samples or lower delta)");
    }
    const double my = sy / n_pd, mz = sz / n_pd;
    const double pz = tail_prob(config.spec.x_law, b);
    const double cov = syz / n_pd - my * mz;
    const double vz = mz - mz * mz;
    const double vy = my - my * my;
    const double beta = vz > 0.0 ? cov / vz : 0.0;
    const double p_hat = std::clamp(my - beta * (mz - pz), 1e-300, 1.0);
    const double var_resid = std::max(0.0, vy - 2.0 * beta * cov + beta * beta * vz) * n_pd / std::max(1.0, n_pd - 1.0);
    res.p_big = make_estimate(p_hat, std::sqrt(var_resid / n_pd), n_p, lineage(config.seed, "pbig"));

    // Strata m = 0..m_max with P(M > m_max) <= tail_tol and m_max >= k + 2.
    const double mu = config.lambda * config.T * p_hat;
    std::size_t m_max = config.k + 2;
    while (poisson_upper(m_max, mu) > config.tail_tol) ++m_max;
    res.remainder_bound = poisson_upper(m_max, mu);
    const std::size_t S = m_max + 1;

    const auto stag = label_hash("stratum");
    std::vector<std::vector<StratumRep>> reps(S);
    auto run_range = [&](std::size_t m, std::size_t lo, std::size_t hi) {
        reps[m].resize(hi);
        parallel_for(hi - lo, workers, [&](std::size_t j) {
            const std::size_t i = lo + j;
            Stream rng(derive_seed(config.seed, {stag, m, i}));
            reps[m][i] = run_stratum_rep(config, centering, m, p_hat, b, hits != nullptr, large_level, rng);
        });
    };
    auto count_hits = [&](std::size_t m) {
        return static_cast<std::size_t>(
            std::count_if(reps[m].begin(), reps[m].end(), [](const StratumRep& r) { return r.hit; }));
    };

    // Pilot, then allocation proportional to weight * binomial sd.
    const std::size_t pilot = std::max<std::size_t>(20, config.n_reps / (4 * S));
    std::vector<double> w(S);
    for (std::size_t m = 0; m < S; ++m) {
        w[m] = poisson_pmf(m, mu);
        run_range(m, 0, pilot);
    }
    const std::size_t budget = config.n_reps > pilot * S ? config.n_reps - pilot * S : 0;
    std::vector<double> score(S);
    double score_sum = 0.0;
    for (std::size_t m = 0; m < S; ++m) {
        const double h = (static_cast<double>(count_hits(m)) + 0.5) / (static_cast<double>(pilot) + 1.0);
        score[m] = w[m] * std::sqrt(h * (1.0 - h));
        score_sum += score[m];
    }
    for (std::size_t m = 0; m < S; ++m) {
        const auto extra = static_cast<std::size_t>(std::floor(static_cast<double>(budget) * score[m] / score_sum));
        if (extra > 0) run_range(m, pilot, pilot + extra);
    }

    double value = 0.0, var = 0.0, dmu = 0.0;
    std::vector<double> h(S);
    for (std::size_t m = 0; m < S; ++m) {
        const std::size_t n = reps[m].size();
        const std::size_t hm = count_hits(m);
        h[m] = static_cast<double>(hm) / static_cast<double>(n);
        value += w[m] * h[m];
        var += w[m] * w[m] * h[m] * (1.0 - h[m]) / static_cast<double>(n);
        dmu += ((m > 0 ? w[m - 1] : 0.0) - w[m]) * h[m];
        res.strata.push_back({m, w[m], n, hm});
    }
    const double d_dp = dmu * config.lambda * config.T;
    var += d_dp * d_dp * res.p_big.std_error * res.p_big.std_error;
    std::size_t total_n = 0;
    for (const auto& s : res.strata) total_n += s.n;
    res.estimate = make_estimate(value, std::sqrt(var), total_n, lineage(config.seed, "stratum"));

    if (hits != nullptr) {
        hits->clear();
        for (std::size_t m = 0; m < S; ++m) {
            const double wm = w[m] / static_cast<double>(reps[m].size());
            for (const auto& r : reps[m]) {
                if (!r.hit) continue;
                HitRecord rec = r.record;
                rec.weight = wm;
                hits->push_back(rec);
            }
        }
    }
    return res;
}

std::string ldp_admissibility(const PathEvent& event, std::size_t k) {
    switch (event.kind) {
        case EventKind::terminal_exceed:
        case EventKind::value_at:
        case EventKind::sup_exceed:
            if (k != 0) {
                return "event " + format_event(event) + " does not force " + std::to_string(k + 1) +
                       " large jumps; it is only admissible at k = 0";
            }
            if (!(event.level > 0.0)) return "event threshold must be > 0 to stay away from continuous paths";
            return {};
        case EventKind::jump_count:
            if (event.count != k + 1) {
                return "jump_count needs m = k + 1 = " + std::to_string(k + 1) + " (got m = " +
                       std::to_string(event.count) + "); other m give a zero or non-separated limit";
            }
            return {};
        case EventKind::dk_proxy:
            if (event.count != k) {
                return "dk_proxy order must equal k = " + std::to_string(k) + " (got " + std::to_string(event.count) + ")";
            }
            return {};
    }
    return "unknown event";
}

LdpResult ldp_ratio(const ExperimentConfig& config, unsigned workers) {
    config.validate();
    const std::string reason = ldp_admissibility(config.event, config.k);
    if (!reason.empty()) throw std::invalid_argument("ldp: event not bounded away from D_k: " + reason);
    const auto measure = limit_measure_for(config.spec, config.model == Model::hawkes);
    LdpResult out;
    out.limit_value = mu_sharp(measure, config.lambda, config.k, config.event);
    out.speed_factor = std::pow(speed_prime(config.spec.x_law, config.scaling()), static_cast<double>(config.k + 1));
    const auto centering = prepare_centering(config);
    if (config.estimator == Estimator::crude) {
        out.probability = crude_estimate(config, centering, workers);
    } else {
        out.splitting = splitting_estimate(config, centering, workers);
        out.probability = out.splitting.estimate;
    }
    const double f = out.speed_factor / out.limit_value;
    out.ratio = make_estimate(out.probability.value * f, out.probability.std_error * f, out.probability.n,
                              out.probability.seed_lineage);
    return out;
}

double spearman_rank(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman_rank: need two equal-length samples");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t q = i; q <= j; ++q) r[idx[q]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

RemainderTable check_remainder(const ExperimentConfig& config, unsigned workers) {
    RemainderTable table;
    const auto& law = config.spec.x_law;
    for (std::size_t g = 0; g < config.T_grid.size(); ++g) {
        const double T = config.T_grid[g];
        const double x_T = std::pow(T, config.eta);
        // Defensive mixture proposal: half the immigrant marks are drawn
        // conditionally above q, the rest from the mark law.
        const double q = 0.25 * x_T;
        const bool tilt = law.heavy() && q > law.scale;
        const double pq = tilt ? tail_prob(law, q) : 1.0;

        const std::size_t n = config.n_clusters;
        const std::size_t nb = (n + kBlock - 1) / kBlock;
        struct Acc {
            double sw = 0, swi = 0, sw2 = 0, sw2i = 0;
            std::size_t accepted = 0;
        };
        std::vector<Acc> acc(nb);
        const auto tag = label_hash("remainder");
        for_blocks(n, kBlock, workers, [&](std::size_t blk, std::size_t lo, std::size_t hi) {
            Stream rng(derive_seed(config.seed, {tag, g, blk}));
            Acc a;
            for (std::size_t i = lo; i < hi; ++i) {
                const double gamma = rng.uniform() * T;
                double mark, weight = 1.0;
                if (tilt) {
                    const bool cond = rng.uniform() < 0.5;
                    const double u = rng.uniform();
                    mark = cond ? quantile(law, 1.0 - pq * (1.0 - u)) : quantile(law, u);
                    weight = 1.0 / (0.5 + (mark > q ? 0.5 / pq : 0.0));
                } else {
                    mark = sample(law, rng);
                }
                const Cluster c = generate_cluster(config, {gamma, mark}, rng);
                if (c.truncated) continue;
                const auto split = split_at_horizon(c, T);
                if (split.retained_sum + split.remainder_sum <= x_T) continue;
                const double ind = split.remainder_sum > x_T ? 1.0 : 0.0;
                ++a.accepted;
                a.sw += weight;
                a.swi += weight * ind;
                a.sw2 += weight * weight;
                a.sw2i += weight * weight * ind;
            }
            acc[blk] = a;
        });
        Acc tot;
        for (const auto& a : acc) {
            tot.sw += a.sw;
            tot.swi += a.swi;
            tot.sw2 += a.sw2;
            tot.sw2i += a.sw2i;
            tot.accepted += a.accepted;
        }
        RemainderRow row;
        row.T = T;
        row.x_T = x_T;
        row.proposals = n;
        row.accepted = tot.accepted;
        if (tot.sw > 0.0) {
            const double p = tot.swi / tot.sw;
            row.estimate = p;
            // Self-normalized estimator: var ~ sum w^2 (I - p)^2 / (sum w)^2.
            const double num = tot.sw2i * (1.0 - p) * (1.0 - p) + (tot.sw2 - tot.sw2i) * p * p;
            row.std_error = std::sqrt(num) / tot.sw;
        }
        row.low_confidence =
            tot.accepted < 100 || static_cast<double>(tot.accepted) / static_cast<double>(n) < 1e-3;
        table.rows.push_back(row);
    }
    if (table.rows.size() >= 2) {
        std::vector<double> ts, es;
        for (const auto& r : table.rows) {
            ts.push_back(r.T);
            es.push_back(r.estimate);
        }
        table.spearman = spearman_rank(ts, es);
    }
    return table;
}

Assumption6Result check_assumption6(const WaitLaw& wait, double eta, double epsilon, const std::vector<double>& T_grid) {
    if (T_grid.empty()) throw std::invalid_argument("check_assumption6: empty T grid");
    if (!(epsilon > 0.0)) throw std::invalid_argument("check_assumption6: epsilon must be > 0");
    Assumption6Result out;
    for (double T : T_grid) {
        // For mark-dependent waits the unconditional law (mark 0) has the
        // heaviest tail, since the mean shrinks as scale / (1 + X).
        const TailLaw w = wait.law;
        out.rows.push_back({T, std::pow(T, eta) * tail_prob(w, epsilon * T)});
    }
    bool monotone = true;
    const std::size_t start = out.rows.size() / 2;
    for (std::size_t i = std::max<std::size_t>(start, 1); i < out.rows.size(); ++i) {
        if (out.rows[i].value > out.rows[i - 1].value) monotone = false;
    }
    out.holds = monotone && out.rows.back().value < 1e-2;
    return out;
}

TailTable check_tail_equivalence(const ExperimentConfig& config, unsigned workers) {
    TailTable table;
    table.measure = limit_measure_for(config.spec, config.model == Model::hawkes);
    const std::size_t n = config.n_clusters;
    std::vector<double> d(n);
    std::vector<double> kk(n);
    std::vector<unsigned char> trunc(n, 0);
    const auto tag = label_hash("tails");
    for_blocks(n, kBlock, workers, [&](std::size_t blk, std::size_t lo, std::size_t hi) {
        Stream rng(derive_seed(config.seed, {tag, blk}));
        for (std::size_t i = lo; i < hi; ++i) {
            Immigrant imm{0.0, sample(config.spec.x_law, rng)};
            const Cluster c = generate_cluster(config, imm, rng);
            d[i] = cluster_total(c);
            kk[i] = static_cast<double>(c.events.size() - 1);
            trunc[i] = c.truncated;
        }
    });
    table.n_clusters = n;
    table.n_truncated = static_cast<std::size_t>(std::count(trunc.begin(), trunc.end(), 1));

    const double C = table.measure.constant;
    const auto& law = config.spec.x_law;
    double predicted_k = std::numeric_limits<double>::quiet_NaN();
    if (config.model == Model::mb) {
        switch (config.spec.dependence) {
            case Dependence::independent_light_k: predicted_k = 0.0; break;
            case Dependence::comonotone:
                predicted_k = std::pow(config.spec.k_param, law.alpha) / C;
                break;
            case Dependence::heavy_k_light_x:
                predicted_k = config.spec.k_alpha == law.alpha ? std::pow(config.spec.k_param / law.scale, law.alpha) / C : 0.0;
                break;
        }
    }
    std::vector<double> sorted = d;
    std::sort(sorted.begin(), sorted.end());
    for (double level : config.quantile_levels) {
        TailRow row;
        row.level = level;
        const auto idx = std::min(n - 1, static_cast<std::size_t>(std::ceil(level * static_cast<double>(n))) - 1);
        row.x = sorted[idx];
        const auto above = static_cast<double>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), row.x));
        row.tail_D = above / static_cast<double>(n);
        const double k_above = static_cast<double>(std::count_if(kk.begin(), kk.end(), [&](double v) { return v > row.x; }));
        const double ref = tail_prob(law, row.x);
        row.ratio_D = row.tail_D / (C * ref);
        row.ratio_K = above > 0 ? k_above / above : 0.0;
        row.ratio_mark = row.tail_D > 0 ? ref / row.tail_D : 0.0;
        row.predicted_K = predicted_k;
        row.predicted_mark = 1.0 / C;
        table.rows.push_back(row);
    }
    return table;
}

namespace {

double weighted_median(std::vector<std::pair<double, double>> vw) {
    if (vw.empty()) return 0.0;
    std::sort(vw.begin(), vw.end());
    double total = 0.0;
    for (const auto& p : vw) total += p.second;
    double acc = 0.0;
    for (const auto& p : vw) {
        acc += p.second;
        if (acc >= 0.5 * total) return p.first;
    }
    return vw.back().first;
}

}  // namespace

AnatomySummary big_jump_anatomy(const ExperimentConfig& config, double large_level, unsigned workers) {
    config.validate();
    const auto centering = prepare_centering(config);
    std::vector<HitRecord> hits;
    splitting_estimate(config, centering, workers, &hits, large_level);
    AnatomySummary s;
    s.large_level = large_level;
    s.n_hits = hits.size();
    std::vector<std::pair<double, double>> total_share, excess_share, spread;
    double w_exact = 0.0;
    for (const auto& h : hits) {
        s.weighted_hits += h.weight;
        total_share.emplace_back(h.top_share_total, h.weight);
        excess_share.emplace_back(h.top_share_excess, h.weight);
        spread.emplace_back(h.time_spread, h.weight);
        if (h.n_large == config.k + 1) w_exact += h.weight;
    }
    if (s.weighted_hits > 0.0) s.frac_exactly_k1_large = w_exact / s.weighted_hits;
    s.median_top_share_total = weighted_median(std::move(total_share));
    s.median_top_share_excess = weighted_median(std::move(excess_share));
    s.median_time_spread = weighted_median(std::move(spread));
    return s;
}

}  // namespace cldp
