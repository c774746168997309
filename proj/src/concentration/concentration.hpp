#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "common/rational.hpp"
#include "concentration/law.hpp"
#include "model/rng.hpp"

namespace rbsing {

inline constexpr std::size_t kDefaultSupportCap = std::size_t{1} << 24;
inline constexpr std::size_t kMaxBruteForceDimension = 25;

// ---------------------------------------------------------------------------
// Laws of Bernoulli-weighted sums

/// Exact law of sum b_i x_i, b_i iid Bernoulli(p), by sequential two-point convolution.
/// Throws BudgetExceeded when min(2^n, span + 1) exceeds `support_cap`.
template <typename Prob>
IntegerPmf<Prob> walk_pmf(std::span<const std::int64_t> x, const Rational& p,
                          std::size_t support_cap = kDefaultSupportCap);

/// Law of sum b_i y_i for real coefficients; atoms are merged only when bitwise equal.
RealLaw subset_sum_law(std::span<const double> y, double p, std::size_t support_cap = kDefaultSupportCap);

// ---------------------------------------------------------------------------
// Levy concentration function

/// sup_lambda P{|Z - lambda| <= t} by a sliding window of width 2t over the sorted support.
template <typename Point, typename Prob>
Prob levy(const DiscreteLaw<Point, Prob>& law, double t) {
    require(t >= 0, "levy: t must be non-negative");
    return max_window_mass(law, 2.0 * t, false);
}

/// Left limit lim_{s -> t-} L(Z, s): windows of width strictly below 2t.
template <typename Point, typename Prob>
Prob levy_left_limit(const DiscreteLaw<Point, Prob>& law, double t) {
    return max_window_mass(law, 2.0 * t, true);
}

/// P{|Z - lambda| <= t}.
template <typename Point, typename Prob>
Prob small_ball(const DiscreteLaw<Point, Prob>& law, double lambda, double t) {
    Prob total = 0;
    const auto pts = law.points();
    const auto prb = law.probs();
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (std::fabs(static_cast<double>(pts[i]) - lambda) <= t) total += prb[i];
    return total;
}

/// Oracle: enumerate all v in {0,1}^n with weight p^|v| (1-p)^(n-|v|).
/// With lambda, returns P{|sum v_i x_i - lambda| <= t}; without, the sup over lambda.
template <typename Prob>
Prob levy_brute(std::span<const double> x, const Rational& p, double t,
                std::optional<double> lambda = std::nullopt);

struct SmallBallEstimate {
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool exact = true;
    std::uint64_t trials = 0;
};

/// P{|sum b_i y_i - lambda| <= t}: exact for n <= 25, Monte Carlo with a Wilson CI above.
SmallBallEstimate shifted_small_ball(std::span<const double> y, double lambda, double p, double t,
                                     std::uint64_t mc_trials = 200000, RngSeed seed = {});

/// sup{r >= 0 : L(Z, r) <= level}; negative when even L(Z, 0) exceeds level.
double concentration_radius(const RealLaw& law, double level);

// ---------------------------------------------------------------------------
// Threshold T_p(x, L)

struct ThresholdQuery {
    double L = 1.0;
    Rational p{1, 2};
};

struct ThresholdResult {
    double T = 1.0;
    double level = 0.0;         // L(Z, T^-) at the optimum
    std::size_t iterations = 0; // fixed-point steps
};

/// sup{t in (0,1] : L(Z, t) > L t} for a law with n summands, computed exactly over the
/// step structure of t -> L(Z, t), and floored at (1 - p)^n / L.
template <typename Point>
ThresholdResult threshold_of_law(const DiscreteLaw<Point, double>& law, double L, double floor_value);

ThresholdResult threshold(std::span<const std::int64_t> x, const ThresholdQuery& q);
ThresholdResult threshold(std::span<const double> x, const ThresholdQuery& q);

// ---------------------------------------------------------------------------
// Essential least common denominator

struct LcdParams {
    double c_prime = 0.5;
    double c = 0.3;
    double lambda_max = 1e3;
    double grid = 1e-3;
};

/// dist(v, Z^n) in the Euclidean norm.
double lattice_distance(std::span<const double> v);

/// Smallest lambda in (0, lambda_max] with dist(lambda x, Z^n) <= min(c' lambda, c sqrt(n)),
/// by grid scan then bisection to 1e-9; +infinity when none is found.
double lcd(std::span<const double> x, const LcdParams& params);

// ---------------------------------------------------------------------------
// Classical bounds with configurable constants

struct RogozinTerm {
    double one_minus_levy = 0.0;  // 1 - L(xi_i, r_i)
    double radius = 0.0;          // r_i
};

/// C r / sqrt(sum (1 - L_i) r_i^2); +infinity for a vanishing denominator.
double rogozin_bound(std::span<const RogozinTerm> terms, double r, double C = 1.0);

struct TensorizationArgsV1 {
    double K = 1.0;
    double eps = 1.0;
    double eps0 = 0.0;
    std::size_t m = 1;
    double C = 1.0;
};

struct TensorizationArgsV2 {
    double eta = 1.0;
    double tau = 1.0;
    double eps = 1.0;
    std::size_t m = 1;
};

/// (C K eps)^m for eps >= eps0.
double tensorization_bound(const TensorizationArgsV1& args);
/// (e / eps)^(eps m) tau^(m - eps m) for eps in (0, 1].
double tensorization_bound(const TensorizationArgsV2& args);

}  // namespace rbsing
