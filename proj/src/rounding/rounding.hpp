#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "common/rational.hpp"
#include "concentration/law.hpp"
#include "model/rng.hpp"

namespace rbsing {

struct RoundingConstants {
    double C = 8.0;
    double c = 0.125;
    double sum_bound = 1.0444659357341870;  // sqrt(12/11); the gap limit is sum_bound * sqrt(n)
};

inline constexpr std::uint64_t kDefaultRoundingBudget = 10000;
inline constexpr std::size_t kMaxRoundingDimension = 25;

struct BulletCheck {
    bool pass = false;
    double measured = 0.0;
    double limit = 0.0;
};

/// Sup of P{|S - lambda| <= t} / t over t >= t_min, with the t where it is attained.
struct SlopeSup {
    double slope = 0.0;
    double at = 0.0;
};

struct RoundingCertificate {
    std::vector<double> y;
    std::vector<std::int64_t> y_prime;
    double lambda = 0.0;
    double p = 0.5;
    double L = 0.0;
    RoundingConstants constants;

    // 0: sup-norm distance <= 1
    // 1: small-ball slope over t >= sqrt(n) <= C L
    // 2: Levy ratio L(y', sqrt n) / L(y, sqrt n) >= c
    // 3: |sum y - sum y'| <= sum_bound sqrt(n)
    std::array<BulletCheck, 4> checks{};
    double slope_at = 0.0;      // t attaining the slope sup for y'
    double levy_y = 0.0;        // L(sum b_i y_i, sqrt n)
    double levy_y_prime = 0.0;  // L(sum b_i y'_i, sqrt n)
    std::uint64_t attempts = 0;
    bool exact = true;

    std::size_t passed() const;
    bool valid() const { return passed() == 4; }
};

class HypothesisFailed : public std::runtime_error {
public:
    HypothesisFailed(double slope, double L);
    double slope() const noexcept { return slope_; }
    double L() const noexcept { return L_; }

private:
    double slope_;
    double L_;
};

class BudgetExhausted : public std::runtime_error {
public:
    BudgetExhausted(std::uint64_t attempts, RoundingCertificate best_partial);
    std::uint64_t attempts() const noexcept { return attempts_; }
    const RoundingCertificate& best_partial() const noexcept { return best_; }

private:
    std::uint64_t attempts_;
    RoundingCertificate best_;
};

class CertificateInvalid : public std::runtime_error {
public:
    explicit CertificateInvalid(std::vector<int> failed);
    /// 1-based bullet numbers that did not confirm.
    const std::vector<int>& failed_bullets() const noexcept { return failed_; }

private:
    std::vector<int> failed_;
};

/// Exact slope sup from a law: the ratio only peaks at t_min or at a breakpoint |s - lambda| >= t_min.
SlopeSup small_ball_slope(const RealLaw& law, double lambda, double t_min);

/// One rounding draw: coordinate i rounds up with probability y_i - floor(y_i), using draw attempt * n + i.
std::vector<std::int64_t> rounding_sample(std::span<const double> y, const CounterRng& rng, std::uint64_t attempt);

/// Fills the four checks for a candidate y'. levy_y is L(sum b_i y_i, sqrt n), computed once by the caller.
RoundingCertificate evaluate_candidate(std::span<const double> y, std::span<const std::int64_t> y_prime, double lambda,
                                       double p, double L, const RoundingConstants& constants, double levy_y);

/// Samples until all four checks pass. Throws HypothesisFailed when y itself violates the slope bound,
/// BudgetExhausted after `budget` failed draws. Exact mode only (n <= 25).
RoundingCertificate randomized_round(std::span<const double> y, double lambda, double p, double L,
                                     const RoundingConstants& constants = {},
                                     std::uint64_t budget = kDefaultRoundingBudget, RngSeed seed = {});

struct RoundingReport {
    std::array<BulletCheck, 4> checks{};
    double levy_y = 0.0;
    double levy_y_prime = 0.0;
};

/// Recomputes every measured quantity by direct enumeration of {0,1}^n and confirms the certificate.
/// Throws CertificateInvalid listing the bullets that fail or disagree.
RoundingReport verify_rounding(const RoundingCertificate& cert, double p);

struct YConstruction {
    std::vector<std::int64_t> Y;
    double T = 0.0;
    double L = 0.0;
    double s = 0.0;
    RoundingCertificate certificate;  // for y = (sqrt n / T) x, lambda = -s sum y, slope bound L T / sqrt n
    // The four properties in terms of x:
    double sup_distance = 0.0;   // <= 1
    double slope = 0.0;          // <= C L T / sqrt n
    double levy = 0.0;           // >= (c / 2) L T
    double sum_gap = 0.0;        // <= C sqrt n
    bool properties_hold = false;
};

YConstruction construct_Y(const Rational& p, std::span<const double> x, double L, double s, RngSeed seed,
                          const RoundingConstants& constants = {}, std::uint64_t budget = kDefaultRoundingBudget);

}  // namespace rbsing
