#include "averaging/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/errors.hpp"
#include "common/parallel.hpp"
#include "common/stats.hpp"
#include "concentration/concentration.hpp"

namespace rbsing {

// Seed function and log view -------------------------------------------------

double seed_normalizer(std::size_t n) {
    require(n >= 1, "seed_normalizer: n must be positive");
    const double r = std::exp2(-1.0 / std::sqrt(static_cast<double>(n)));
    return 1.0 + 2.0 * r / (1.0 - r);
}

WindowedFunction<double> seed_function(std::size_t n, std::int64_t half_width) {
    require(n >= 1, "seed_function: n must be positive");
    const double sn = std::sqrt(static_cast<double>(n));
    require(static_cast<double>(half_width) >= 40.0 * sn, "seed_function: window too small (need half_width >= 40 sqrt(n))");
    const double m0 = seed_normalizer(n);
    const double r = std::exp2(-1.0 / sn);
    std::vector<double> values(static_cast<std::size_t>(2 * half_width + 1));
    for (std::int64_t t = -half_width; t <= half_width; ++t)
        values[static_cast<std::size_t>(t + half_width)] = std::exp2(-static_cast<double>(t < 0 ? -t : t) / sn) / m0;
    // Both tails: 2 sum_{t > W} r^t / m0.
    const double loss = 2.0 * std::pow(r, static_cast<double>(half_width + 1)) / (1.0 - r) / m0;
    return WindowedFunction<double>::from_parts(-half_width, std::move(values), 1.0 - loss, loss);
}

namespace {

double log_view(double v) {
    if (v == 0.0) throw InvalidArgument("log2_lipschitz_constant: zero value inside window");
    return std::log2(std::max(v, kLogFloor));
}

}  // namespace

double log2_lipschitz_constant(const WindowedFunction<double>& f) {
    if (f.size() == 0) return 0.0;
    return log2_lipschitz_constant(f, f.offset(), f.end() - 1);
}

double log2_lipschitz_constant(const WindowedFunction<double>& f, std::int64_t lo, std::int64_t hi) {
    const std::int64_t a = std::max(lo, f.offset());
    const std::int64_t b = std::min(hi, f.end() - 1);
    double best = 0.0;
    if (a > b) return best;
    double prev = log_view(f(a));
    for (std::int64_t t = a + 1; t <= b; ++t) {
        const double cur = log_view(f(t));
        best = std::max(best, std::fabs(cur - prev));
        prev = cur;
    }
    return best;
}

// Averaging runs ------------------------------------------------------------

const WindowedFunction<double>* AveragingRun::snapshot(std::size_t i) const {
    auto it = std::lower_bound(snapshot_at.begin(), snapshot_at.end(), i);
    if (it == snapshot_at.end() || *it != i) return nullptr;
    return &snapshots[static_cast<std::size_t>(it - snapshot_at.begin())];
}

const WindowedFunction<double>& AveragingRun::final_function() const {
    const auto* f = snapshot(length());
    require(f != nullptr, "AveragingRun: final snapshot missing");
    return *f;
}

std::vector<std::size_t> all_steps(std::size_t l) {
    std::vector<std::size_t> out(l + 1);
    for (std::size_t i = 0; i <= l; ++i) out[i] = i;
    return out;
}

namespace {

AveragingRun fold_run(const WindowedFunction<double>& f0, const AdmissibleSet& A, double p,
                      std::vector<std::int64_t> X, std::vector<std::size_t> snapshot_at, std::size_t window_cap) {
    AveragingRun run;
    run.A = A;
    run.p = p;
    run.X = std::move(X);
    const std::size_t l = run.X.size();
    snapshot_at.push_back(l);
    std::sort(snapshot_at.begin(), snapshot_at.end());
    snapshot_at.erase(std::unique(snapshot_at.begin(), snapshot_at.end()), snapshot_at.end());
    require(snapshot_at.back() <= l, "average_sequence: snapshot index beyond l");
    run.snapshot_at = std::move(snapshot_at);
    run.snapshots.reserve(run.snapshot_at.size());

    WindowedFunction<double> f = f0;
    std::size_t next = 0;
    for (std::size_t i = 0;; ++i) {
        if (next < run.snapshot_at.size() && run.snapshot_at[next] == i) {
            run.snapshots.push_back(f);
            ++next;
        }
        if (i == l) break;
        f = average_step(f, run.X[i], p, window_cap);
    }
    return run;
}

}  // namespace

AveragingRun average_sequence(const WindowedFunction<double>& f0, const AdmissibleSet& A, double p, std::size_t l,
                              RngSeed seed, std::vector<std::size_t> snapshot_at, std::size_t window_cap) {
    require(l <= A.n(), "average_sequence: l must not exceed n");
    require(p >= 0 && p <= 1, "average_sequence: p must lie in [0, 1]");
    CounterRng rng(seed);
    std::vector<std::int64_t> X(l);
    for (std::size_t i = 0; i < l; ++i) X[i] = A.sets[i].sample(rng);
    return fold_run(f0, A, p, std::move(X), std::move(snapshot_at), window_cap);
}

AveragingRun average_sequence(const WindowedFunction<double>& f0, const AdmissibleSet& A, double p,
                              std::span<const std::int64_t> X, std::vector<std::size_t> snapshot_at,
                              std::size_t window_cap) {
    require(X.size() <= A.n(), "average_sequence: l must not exceed n");
    require(p >= 0 && p <= 1, "average_sequence: p must lie in [0, 1]");
    for (std::size_t i = 0; i < X.size(); ++i) require(A.sets[i].contains(X[i]), "average_sequence: X_i not in A_i");
    return fold_run(f0, A, p, std::vector<std::int64_t>(X.begin(), X.end()), std::move(snapshot_at), window_cap);
}

DescendantSequence descend_and_decay(AveragingRun& run, double R, std::int64_t t_start, std::span<const int> v) {
    const std::size_t l = run.length();
    require(v.size() == l, "descend_and_decay: need one bit per step");
    require(R > 0, "descend_and_decay: R must be positive");
    require(run.A.N >= 1 && run.A.n() >= 1, "descend_and_decay: run has no admissible set");
    for (std::size_t m = 0; m < l; ++m)
        if (run.snapshot(m) == nullptr) throw InvalidArgument("descend_and_decay: missing snapshot");

    const double cut = R / (static_cast<double>(run.A.N) * std::sqrt(static_cast<double>(run.A.n())));
    DescendantSequence out;
    out.t.resize(l + 1);
    out.decayed.resize(l);
    out.t[0] = t_start;
    for (std::size_t i = 1; i <= l; ++i) {
        require(v[i - 1] == 0 || v[i - 1] == 1, "descend_and_decay: v must be a bit sequence");
        out.t[i] = out.t[i - 1] - v[i - 1] * run.X[i - 1];
    }
    run.R = R;
    for (std::size_t m = 1; m <= l; ++m) {
        const auto& f = *run.snapshot(m - 1);
        const std::int64_t t = out.t[m - 1];
        const std::int64_t x = run.X[m - 1];
        const bool d = f(t + x) <= cut && f(t - x) <= cut;
        out.decayed[m - 1] = d;
        if (!d) ++out.non_decay_count;
        run.decay_log.push_back({t, m, d});
    }
    return out;
}

SpikeChain greedy_spike_chain(const AveragingRun& run) {
    const std::size_t l = run.length();
    for (std::size_t i = 0; i <= l; ++i)
        if (run.snapshot(i) == nullptr) throw InvalidArgument("greedy_spike_chain: missing snapshot");
    SpikeChain chain;
    chain.t.resize(l + 1);
    chain.v.resize(l);
    chain.value.resize(l + 1);
    const auto& fl = run.final_function();
    chain.t[l] = fl.argmax();
    chain.value[l] = fl(chain.t[l]);
    for (std::size_t i = l; i >= 1; --i) {
        const auto& prev = *run.snapshot(i - 1);
        const double target = chain.value[i];
        const double tol = 1e-12 * target;
        const double stay = prev(chain.t[i]);
        const double jump = prev(chain.t[i] + run.X[i - 1]);
        int vi;
        if (stay >= target - tol)
            vi = 0;
        else if (jump >= target - tol)
            vi = 1;
        else
            vi = jump > stay ? 1 : 0;
        chain.v[i - 1] = vi;
        chain.t[i - 1] = chain.t[i] + vi * run.X[i - 1];
        chain.value[i - 1] = prev(chain.t[i - 1]);
        if (chain.value[i - 1] < target - tol) throw PropertyViolation("greedy_spike_chain: chain is not monotone");
    }
    return chain;
}

Ell2Mix ell2_mix_identity(const WindowedFunction<double>& f, const WindowedFunction<double>& g, double p) {
    require(p >= 0 && p <= 1, "ell2_mix_identity: p must lie in [0, 1]");
    const double q = 1.0 - p;
    Ell2Mix out;
    if (f.size() == 0 && g.size() == 0) return out;
    std::int64_t lo, hi;
    if (f.size() == 0) {
        lo = g.offset();
        hi = g.end();
    } else if (g.size() == 0) {
        lo = f.offset();
        hi = f.end();
    } else {
        lo = std::min(f.offset(), g.offset());
        hi = std::max(f.end(), g.end());
    }
    double ff = 0.0, gg = 0.0, mix = 0.0, diff = 0.0;
    for (std::int64_t t = lo; t < hi; ++t) {
        const double a = f(t), b = g(t);
        ff += a * a;
        gg += b * b;
        const double m = p * a + q * b;
        mix += m * m;
        diff += (a - b) * (a - b);
    }
    out.lhs = mix;
    out.rhs = p * ff + q * gg;
    out.drop = p * q * diff;
    return out;
}

IntervalMassDiagnostic interval_mass_diagnostic(const WindowedFunction<double>& f, std::size_t N, double delta0,
                                                std::size_t n, double p) {
    require(delta0 > 0 && delta0 <= 1, "interval_mass_diagnostic: delta0 must lie in (0, 1]");
    require(p > 0 && p < 1, "interval_mass_diagnostic: p must lie in (0, 1)");
    const WindowMax w = max_interval_mass(f, N);
    IntervalMassDiagnostic out;
    out.max_mass = w.mass;
    out.start = w.start;
    out.C_hat = w.mass * std::sqrt(delta0 * static_cast<double>(n) * std::min(p, 1.0 - p));
    return out;
}

// Spike intervals -----------------------------------------------------------

void validate_spike_params(const SpikeParams& params) {
    require(params.N >= 1, "spike_intervals: N must be positive");
    require(params.mu > 0 && params.mu <= 1.0 / 16.0, "spike_intervals: mu must lie in (0, 1/16]");
    require(params.R > 0, "spike_intervals: R must be positive");
    require(params.I0.size() == static_cast<std::uint64_t>(params.N), "spike_intervals: |I0| must equal N");
}

SpikeHypotheses check_spike_hypotheses(const WindowedFunction<double>& g1, const SpikeParams& params) {
    validate_spike_params(params);
    SpikeHypotheses h;
    const std::int64_t top = params.I0.hi + params.N;
    if (g1.offset() > params.I0.lo || g1.end() - 1 < top) return h;  // window must cover I0 + {0..N}
    const double mu4 = std::pow(params.mu, 4);
    bool positive = std::all_of(g1.values().begin(), g1.values().end(), [](double v) { return v > 0.0; });
    if (positive) {
        h.lipschitz = log2_lipschitz_constant(g1);
        h.lipschitz_ok = h.lipschitz <= mu4;
    } else {
        h.lipschitz = std::numeric_limits<double>::infinity();
    }
    h.max_window_mass = max_interval_mass(g1, static_cast<std::size_t>(params.N)).mass;
    h.mass_ok = h.max_window_mass <= params.R * static_cast<double>(params.N);
    for (std::int64_t t = params.I0.lo; t <= params.I0.hi; ++t)
        if (g1(t) >= 8.0 * params.R) ++h.spike_count;
    h.spikes_ok = static_cast<double>(h.spike_count) >= params.mu * static_cast<double>(params.N);
    return h;
}

namespace {

struct Levels {
    double base;
    double mu2;
    std::size_t count;

    double at(std::size_t k) const { return base * std::exp2(static_cast<double>(k) * mu2); }

    /// k with at(k) < g <= at(k+1), or count when g is outside every level band.
    std::size_t band(double g) const {
        if (!(g > at(0)) || g > at(count)) return count;
        auto k = static_cast<std::ptrdiff_t>(std::ceil(std::log2(g / base) / mu2)) - 1;
        k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(count) - 1);
        while (k > 0 && g <= at(static_cast<std::size_t>(k))) --k;
        while (k + 1 < static_cast<std::ptrdiff_t>(count) && g > at(static_cast<std::size_t>(k) + 1)) ++k;
        return static_cast<std::size_t>(k);
    }
};

}  // namespace

SpikeIntervals build_spike_intervals(const WindowedFunction<double>& g1, const SpikeParams& params) {
    validate_spike_params(params);
    const double mu2 = params.mu * params.mu;
    const double delta = 8.0 * params.mu;
    const std::int64_t lo0 = params.I0.lo, hi0 = params.I0.hi;
    const std::int64_t top = hi0 + params.N;  // max of I0 + {0..N}

    const Levels levels{4.0 * params.R, mu2, static_cast<std::size_t>(std::floor(1.0 / mu2))};
    std::vector<std::size_t> hits(levels.count, 0);
    for (std::int64_t t = lo0; t <= top; ++t) {
        const std::size_t k = levels.band(g1(t));
        if (k < levels.count) ++hits[k];
    }
    SpikeIntervals out;
    out.level_index = static_cast<std::size_t>(std::min_element(hits.begin(), hits.end()) - hits.begin());
    out.mid_count = hits[out.level_index];
    out.a = levels.at(out.level_index);
    out.a_hi = levels.at(out.level_index + 1);

    auto next_spike = [&](std::int64_t from) -> std::optional<std::int64_t> {
        for (std::int64_t t = from; t <= hi0; ++t)
            if (g1(t) >= out.a_hi) return t;
        return std::nullopt;
    };

    auto left = next_spike(lo0);
    while (left) {
        const std::int64_t tl = *left;
        const double cap_all = delta * static_cast<double>(top - tl + 1);
        std::int64_t tr = tl;
        std::uint64_t small = 0;
        for (std::int64_t t = tl; t <= top; ++t) {
            if (g1(t) <= out.a) ++small;
            if (static_cast<double>(small) <= delta * static_cast<double>(t - tl + 1)) tr = t;
            if (static_cast<double>(small) > cap_all) break;  // no later t can qualify
        }
        out.intervals.push_back({tl, tr});
        if (tr >= hi0) break;
        left = next_spike(tr + 1);
    }
    return out;
}

SpikeProperties spike_interval_properties(const WindowedFunction<double>& g1, const SpikeParams& params,
                                          const SpikeIntervals& result) {
    SpikeProperties prop;
    const double delta = 8.0 * params.mu;
    for (const auto& iv : result.intervals) {
        if (iv.lo < params.I0.lo || iv.lo > params.I0.hi) prop.a = false;
        const auto len = static_cast<double>(iv.size());
        if (iv.size() > static_cast<std::uint64_t>(params.N)) prop.b = false;
        if (!(len > 1.0 / (4.0 * params.mu))) prop.c = false;
        std::uint64_t small = 0;
        for (std::int64_t t = iv.lo; t <= iv.hi; ++t)
            if (g1(t) <= result.a) ++small;
        if (static_cast<double>(small) < delta * len / 2.0) prop.d = false;
    }
    std::size_t k = 0;
    for (std::int64_t t = params.I0.lo; t <= params.I0.hi && prop.a; ++t) {
        if (g1(t) < result.a_hi) continue;
        while (k < result.intervals.size() && result.intervals[k].hi < t) ++k;
        if (k == result.intervals.size() || result.intervals[k].lo > t) prop.a = false;
    }
    return prop;
}

SpikeIntervals spike_intervals(const WindowedFunction<double>& g1, const SpikeParams& params) {
    const SpikeHypotheses h = check_spike_hypotheses(g1, params);
    if (!h.ok()) throw InvalidArgument("spike_intervals: hypothesis check fails");
    SpikeIntervals out = build_spike_intervals(g1, params);
    if (!spike_interval_properties(g1, params, out).all())
        throw PropertyViolation("spike_intervals: constructed intervals violate (a)-(d)");
    return out;
}

std::size_t max_window_count(const WindowedFunction<double>& f, double level, std::size_t N) {
    require(level > 0, "max_window_count: level must be positive");
    require(N >= 1, "max_window_count: N must be positive");
    const auto& v = f.values();
    std::size_t best = 0, running = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] >= level) ++running;
        if (i >= N && v[i - N] >= level) --running;
        best = std::max(best, running);
    }
    return best;
}

SpikeCountGrowth spike_count_growth(const WindowedFunction<double>& f, std::span<const std::int64_t> xs, double p,
                                    double H, std::size_t N) {
    require(H > 0, "spike_count_growth: H must be positive");
    require(p >= 0 && p <= 1, "spike_count_growth: p must lie in [0, 1]");
    if (f.max_value() > 2.0 * H) throw InvalidArgument("spike_count_growth: sup norm exceeds 2H");
    SpikeCountGrowth out;
    out.pre_count_max = max_window_count(f, H, N);
    const auto averaged = fold_average(f, xs, p);
    if (averaged.truncation_loss() != f.truncation_loss())
        throw BudgetExceeded("spike_count_growth: averaged window was truncated", 0, kDefaultWindowCap);
    out.post_count_max = max_window_count(averaged, std::sqrt(2.0) * H, N);
    out.bound = static_cast<double>(out.pre_count_max) / (std::sqrt(2.0) - 1.0);
    if (static_cast<double>(out.post_count_max) > out.bound)
        throw PropertyViolation("spike_count_growth: post-averaging spike count exceeds the bound");
    return out;
}

// Theorem-B verifier --------------------------------------------------------

std::int64_t theoremB_range_cap(std::size_t n, const Rational& p, double eps) {
    const double base = 1.0 - to_double(p) + eps;
    require(eps > 0 && base > 0 && base < 1, "theoremB: need eps > 0 and 1 - p + eps in (0, 1)");
    const double cap = std::pow(base, -static_cast<double>(n));
    require(cap < 9e18, "theoremB: N cap out of range");
    return static_cast<std::int64_t>(std::floor(cap * (1.0 + 1e-12)));
}

std::int64_t theoremB_memory_cap(std::size_t n, std::size_t support_cap) {
    require(n >= 1, "theoremB: n must be positive");
    return support_cap <= 1 ? 0 : static_cast<std::int64_t>((support_cap - 1) / (2 * n));
}

double theoremB_trial(const TheoremBConfig& cfg, RngSeed seed) {
    require(cfg.n >= 1 && cfg.N >= 1, "theoremB_trial: need n >= 1 and N >= 1");
    require(cfg.p > 0 && cfg.p < 1, "theoremB_trial: p must lie in (0, 1)");
    const std::int64_t range = theoremB_range_cap(cfg.n, cfg.p, cfg.eps);
    require(cfg.N <= range, "theoremB_trial: N exceeds floor((1 - p + eps)^-n)");
    const std::int64_t memory = theoremB_memory_cap(cfg.n, cfg.support_cap);
    if (cfg.N > memory)
        throw BudgetExceeded("theoremB_trial: walk support too large", static_cast<std::size_t>(cfg.N),
                             static_cast<std::size_t>(memory));
    const AdmissibleSet A = theorem_b_domain(cfg.n, cfg.delta, cfg.N);
    CounterRng rng(seed);
    std::vector<std::int64_t> xi(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) xi[i] = A.sets[i].sample(rng);
    const FloatPmf law = walk_pmf<double>(xi, cfg.p, cfg.support_cap);
    return std::min(1.0, levy(law, std::sqrt(static_cast<double>(cfg.n))));
}

std::vector<ExceedancePoint> exceedance_curve(std::span<const double> samples, std::int64_t N,
                                              std::span<const double> LB_grid) {
    require(N >= 1, "exceedance_curve: N must be positive");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<ExceedancePoint> curve;
    curve.reserve(LB_grid.size());
    for (double LB : LB_grid) {
        require(LB >= 0, "exceedance_curve: L_B must be non-negative");
        const double cut = LB / static_cast<double>(N);
        const auto above = static_cast<std::uint64_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), cut));
        const Interval ci = wilson_interval(above, sorted.size());
        curve.push_back({LB, above, sorted.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(sorted.size()),
                         ci.low, ci.high});
    }
    return curve;
}

TheoremBEstimate theoremB_estimate(const TheoremBConfig& cfg, std::uint64_t trials, std::span<const double> LB_grid,
                                   std::uint64_t master, std::uint64_t tag, unsigned threads) {
    require(trials >= 100, "theoremB_estimate: need at least 100 trials");
    TheoremBEstimate out;
    out.range_cap = theoremB_range_cap(cfg.n, cfg.p, cfg.eps);
    out.memory_cap = theoremB_memory_cap(cfg.n, cfg.support_cap);
    out.samples.assign(trials, 0.0);
    parallel_for(trials, threads, [&](std::size_t k) {
        out.samples[k] = theoremB_trial(cfg, RngSeed{master, derive_stream(tag, k)});
    });
    out.curve = exceedance_curve(out.samples, cfg.N, LB_grid);
    return out;
}

}  // namespace rbsing
