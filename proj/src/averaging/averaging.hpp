#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "averaging/windowed.hpp"
#include "concentration/concentration.hpp"
#include "common/rational.hpp"
#include "geometry/geometry.hpp"
#include "model/rng.hpp"

namespace rbsing {

/// Values below this are clamped inside the log view only.
inline constexpr double kLogFloor = 1e-300;

// ---------------------------------------------------------------------------
// Seed function and log-Lipschitz view

/// sum_{t in Z} 2^{-|t|/sqrt(n)} = 1 + 2r/(1-r), r = 2^{-1/sqrt(n)}.
double seed_normalizer(std::size_t n);

/// f(t) = 2^{-|t|/sqrt(n)} / m0 on [-half_width, half_width]; the tail is booked as truncation loss.
/// Requires half_width >= 40 sqrt(n).
WindowedFunction<double> seed_function(std::size_t n, std::int64_t half_width);

/// max |log2 f(t) - log2 f(t+1)| over adjacent window points; throws on a zero value.
double log2_lipschitz_constant(const WindowedFunction<double>& f);
/// Same, restricted to pairs with lo <= t < t + 1 <= hi.
double log2_lipschitz_constant(const WindowedFunction<double>& f, std::int64_t lo, std::int64_t hi);

// ---------------------------------------------------------------------------
// Averaging process

/// f_l(t) = E_b f_0(t + sum b_i x_i), folded one step at a time.
template <typename Scalar>
WindowedFunction<Scalar> fold_average(const WindowedFunction<Scalar>& f0, std::span<const std::int64_t> xs,
                                      const Scalar& p, std::size_t window_cap = kDefaultWindowCap) {
    WindowedFunction<Scalar> f = f0;
    for (auto x : xs) f = average_step(f, x, p, window_cap);
    return f;
}

/// Oracle: sum over v in {0,1}^l of p^|v| (1-p)^(l-|v|) f_0(t + sum v_i x_i), evaluated on [lo, hi].
template <typename Scalar>
std::vector<Scalar> direct_average(const WindowedFunction<Scalar>& f0, std::span<const std::int64_t> xs,
                                   const Scalar& p, std::int64_t lo, std::int64_t hi) {
    require(xs.size() <= 20, "direct_average: at most 20 shifts");
    require(hi >= lo, "direct_average: empty range");
    const Scalar q = Scalar(1) - p;
    std::vector<Scalar> out(static_cast<std::size_t>(hi - lo + 1), Scalar(0));
    const std::uint64_t count = std::uint64_t{1} << xs.size();
    for (std::uint64_t v = 0; v < count; ++v) {
        Scalar w = 1;
        std::int64_t shift = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if ((v >> i) & 1U) {
                w *= p;
                shift += xs[i];
            } else {
                w *= q;
            }
        }
        for (std::int64_t t = lo; t <= hi; ++t) out[static_cast<std::size_t>(t - lo)] += w * f0(t + shift);
    }
    return out;
}

struct DecayRecord {
    std::int64_t t = 0;   // the point t_{m-1} tested at time m
    std::size_t m = 0;
    bool decayed = false;
};

struct AveragingRun {
    AdmissibleSet A;
    double p = 0.5;
    std::vector<std::int64_t> X;                 // X_1..X_l (0-based storage)
    std::vector<std::size_t> snapshot_at;        // sorted step indices
    std::vector<WindowedFunction<double>> snapshots;
    double R = 0.0;
    std::vector<DecayRecord> decay_log;

    std::size_t length() const { return X.size(); }
    /// Snapshot f_{A,p,i}, or nullptr when it was not kept.
    const WindowedFunction<double>* snapshot(std::size_t i) const;
    const WindowedFunction<double>& final_function() const;
};

/// 0, 1, ..., l
std::vector<std::size_t> all_steps(std::size_t l);

/// Samples X_i uniform on A_i from the counter stream `seed` (draw order i = 1..l) and folds average_step.
/// The final step l is always kept.
AveragingRun average_sequence(const WindowedFunction<double>& f0, const AdmissibleSet& A, double p, std::size_t l,
                              RngSeed seed, std::vector<std::size_t> snapshot_at,
                              std::size_t window_cap = kDefaultWindowCap);

/// Same with caller-chosen X_i (each must lie in A_i).
AveragingRun average_sequence(const WindowedFunction<double>& f0, const AdmissibleSet& A, double p,
                              std::span<const std::int64_t> X, std::vector<std::size_t> snapshot_at,
                              std::size_t window_cap = kDefaultWindowCap);

struct DescendantSequence {
    std::vector<std::int64_t> t;   // t_0..t_l
    std::vector<bool> decayed;     // entry m-1: t_{m-1} decays at time m
    std::size_t non_decay_count = 0;
};

/// t_i = t - sum_{j<=i} v_j X_j; flags f_{m-1}(t_{m-1} +- X_m) <= R / (N sqrt(n)).
/// Needs snapshots 0..l-1. Stores R and appends the records to the run's decay log.
DescendantSequence descend_and_decay(AveragingRun& run, double R, std::int64_t t_start, std::span<const int> v);

struct SpikeChain {
    std::vector<std::int64_t> t;   // t_0..t_l
    std::vector<int> v;            // v_1..v_l
    std::vector<double> value;     // f_i(t_i)
};

/// Backward greedy chain from the lowest argmax of f_l. Needs every snapshot 0..l.
/// Throws PropertyViolation if f_{i-1}(t_{i-1}) >= f_i(t_i) fails beyond rounding.
SpikeChain greedy_spike_chain(const AveragingRun& run);

struct Ell2Mix {
    double lhs = 0.0;   // |p f + (1-p) g|^2
    double rhs = 0.0;   // p |f|^2 + (1-p) |g|^2
    double drop = 0.0;  // p (1-p) |f - g|^2
};

Ell2Mix ell2_mix_identity(const WindowedFunction<double>& f, const WindowedFunction<double>& g, double p);

struct IntervalMassDiagnostic {
    double max_mass = 0.0;
    std::int64_t start = 0;
    double C_hat = 0.0;  // max_mass * sqrt(delta0 n min(p, 1-p))
};

IntervalMassDiagnostic interval_mass_diagnostic(const WindowedFunction<double>& f, std::size_t N, double delta0,
                                                std::size_t n, double p);

// ---------------------------------------------------------------------------
// Spike intervals

struct SpikeParams {
    std::int64_t N = 0;
    double mu = 0.0;
    double R = 0.0;
    IntInterval I0;  // |I0| = N
};

struct SpikeHypotheses {
    double lipschitz = 0.0;          // of log2 g1 over the window
    double max_window_mass = 0.0;    // over length-N intervals
    std::size_t spike_count = 0;     // #{t in I0 : g1(t) >= 8R}
    bool lipschitz_ok = false;
    bool mass_ok = false;
    bool spikes_ok = false;

    bool ok() const { return lipschitz_ok && mass_ok && spikes_ok; }
};

struct SpikeIntervals {
    double a = 0.0;               // level; spikes are points with g1 >= a_hi
    double a_hi = 0.0;            // 2^{mu^2} a
    std::size_t level_index = 0;  // a = 4R 2^{k mu^2}
    std::size_t mid_count = 0;    // #{t in I0 + {0..N} : g1(t) in (a, a_hi]}
    std::vector<IntInterval> intervals;
};

struct SpikeProperties {
    bool a = true;  // left ends in I0, union covers the spikes of I0
    bool b = true;  // |I'_k| <= N
    bool c = true;  // |I'_k| > 1 / (4 mu)
    bool d = true;  // #{g1 <= a} >= delta |I'_k| / 2

    bool all() const { return a && b && c && d; }
};

void validate_spike_params(const SpikeParams& params);
SpikeHypotheses check_spike_hypotheses(const WindowedFunction<double>& g1, const SpikeParams& params);
/// Level choice plus interval scan, without checking the hypotheses.
SpikeIntervals build_spike_intervals(const WindowedFunction<double>& g1, const SpikeParams& params);
SpikeProperties spike_interval_properties(const WindowedFunction<double>& g1, const SpikeParams& params,
                                          const SpikeIntervals& result);
/// Checked construction: InvalidArgument when a hypothesis fails, PropertyViolation when (a)-(d) fail.
SpikeIntervals spike_intervals(const WindowedFunction<double>& g1, const SpikeParams& params);

struct SpikeCountGrowth {
    std::size_t pre_count_max = 0;   // max_J #{t in J : f(t) >= H}
    std::size_t post_count_max = 0;  // max_J #{t in J : f~(t) >= sqrt(2) H}
    double bound = 0.0;              // pre_count_max / (sqrt(2) - 1)
};

/// Max per-window spike counts before and after averaging along xs. Requires |f|_inf <= 2H.
SpikeCountGrowth spike_count_growth(const WindowedFunction<double>& f, std::span<const std::int64_t> xs, double p,
                                    double H, std::size_t N);

/// max over length-N windows of #{t : f(t) >= level}, level > 0.
std::size_t max_window_count(const WindowedFunction<double>& f, double level, std::size_t N);

// ---------------------------------------------------------------------------
// Theorem-B verifier

struct TheoremBConfig {
    std::size_t n = 14;
    double delta = 0.25;
    Rational p{1, 2};
    double eps = 0.1;
    std::int64_t N = 1;
    std::size_t support_cap = kDefaultSupportCap;
};

/// floor((1 - p + eps)^{-n})
std::int64_t theoremB_range_cap(std::size_t n, const Rational& p, double eps);
/// Largest N whose walk support n * 2N + 1 fits in support_cap.
std::int64_t theoremB_memory_cap(std::size_t n, std::size_t support_cap);

/// Exact L(sum b_i xi_i, sqrt(n)) for xi uniform on the theorem-b domain, drawn from `seed`.
double theoremB_trial(const TheoremBConfig& cfg, RngSeed seed);

struct ExceedancePoint {
    double L_B = 0.0;
    std::uint64_t count = 0;  // trials with L_b > L_B / N
    double fraction = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct TheoremBEstimate {
    std::vector<double> samples;
    std::vector<ExceedancePoint> curve;
    std::int64_t range_cap = 0;
    std::int64_t memory_cap = 0;
};

/// Exceedance curve of the trial values; trial k uses stream derive_stream(tag, k) under `master`.
TheoremBEstimate theoremB_estimate(const TheoremBConfig& cfg, std::uint64_t trials, std::span<const double> LB_grid,
                                   std::uint64_t master, std::uint64_t tag, unsigned threads = 1);

/// Curve from precomputed samples (nonincreasing in L_B for a sorted grid).
std::vector<ExceedancePoint> exceedance_curve(std::span<const double> samples, std::int64_t N,
                                              std::span<const double> LB_grid);

}  // namespace rbsing
