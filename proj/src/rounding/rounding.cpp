#include "rounding/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "common/errors.hpp"
#include "concentration/concentration.hpp"

namespace rbsing {

namespace {

// Relative slack for float round-off in the hypothesis check only.
constexpr double kHypothesisSlack = 1e-12;
constexpr std::size_t kLawCap = std::size_t{1} << 25;

std::string failed_message(const std::vector<int>& failed) {
    std::string s = "rounding certificate invalid: bullets";
    for (int b : failed) s += " " + std::to_string(b);
    return s;
}

// Sup of cum(t) / t over t >= t_min for atoms at distances d (sorted with weights).
SlopeSup slope_from_distances(std::vector<std::pair<double, double>> dw, double t_min) {
    std::sort(dw.begin(), dw.end());
    SlopeSup out{0.0, t_min};
    double cum = 0.0;
    std::size_t i = 0;
    while (i < dw.size() && dw[i].first <= t_min) cum += dw[i++].second;
    if (t_min > 0) out.slope = cum / t_min;
    while (i < dw.size()) {
        const double d = dw[i].first;
        while (i < dw.size() && dw[i].first == d) cum += dw[i++].second;
        const double r = cum / d;
        if (r > out.slope) out = {r, d};
    }
    return out;
}

void check_inputs(std::span<const double> y, double p) {
    require(!y.empty(), "rounding: empty vector");
    require(p > 0 && p < 1, "rounding: p must lie in (0, 1)");
    if (y.size() > kMaxRoundingDimension)
        throw BudgetExceeded("rounding: exact certificates need n <= 25", y.size(), kMaxRoundingDimension);
    for (double v : y) require(std::isfinite(v) && std::fabs(v) < 1e15, "rounding: coordinates must be finite");
}

std::vector<double> as_real(std::span<const std::int64_t> v) { return {v.begin(), v.end()}; }

}  // namespace

std::size_t RoundingCertificate::passed() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const BulletCheck& b) { return b.pass; }));
}

HypothesisFailed::HypothesisFailed(double slope, double L)
    : std::runtime_error("rounding hypothesis fails: small-ball slope " + std::to_string(slope) + " exceeds L = " +
                         std::to_string(L)),
      slope_(slope), L_(L) {}

BudgetExhausted::BudgetExhausted(std::uint64_t attempts, RoundingCertificate best_partial)
    : std::runtime_error("rounding budget exhausted after " + std::to_string(attempts) + " attempts"),
      attempts_(attempts), best_(std::move(best_partial)) {}

CertificateInvalid::CertificateInvalid(std::vector<int> failed)
    : std::runtime_error(failed_message(failed)), failed_(std::move(failed)) {}

SlopeSup small_ball_slope(const RealLaw& law, double lambda, double t_min) {
    require(t_min > 0, "small_ball_slope: t_min must be positive");
    std::vector<std::pair<double, double>> dw;
    dw.reserve(law.size());
    const auto pts = law.points();
    const auto prb = law.probs();
    for (std::size_t i = 0; i < pts.size(); ++i) dw.emplace_back(std::fabs(pts[i] - lambda), prb[i]);
    return slope_from_distances(std::move(dw), t_min);
}

std::vector<std::int64_t> rounding_sample(std::span<const double> y, const CounterRng& rng, std::uint64_t attempt) {
    const std::size_t n = y.size();
    std::vector<std::int64_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double fl = std::floor(y[i]);
        const double frac = y[i] - fl;
        const double u = static_cast<double>(rng.at(attempt * n + i) >> 11) * 0x1.0p-53;
        out[i] = static_cast<std::int64_t>(fl) + (u < frac ? 1 : 0);
    }
    return out;
}

RoundingCertificate evaluate_candidate(std::span<const double> y, std::span<const std::int64_t> y_prime, double lambda,
                                       double p, double L, const RoundingConstants& constants, double levy_y) {
    require(y.size() == y_prime.size(), "evaluate_candidate: size mismatch");
    require(levy_y > 0, "evaluate_candidate: L(y, sqrt n) must be positive");
    const double sn = std::sqrt(static_cast<double>(y.size()));
    RoundingCertificate cert;
    cert.y.assign(y.begin(), y.end());
    cert.y_prime.assign(y_prime.begin(), y_prime.end());
    cert.lambda = lambda;
    cert.p = p;
    cert.L = L;
    cert.constants = constants;
    cert.levy_y = levy_y;

    double sup = 0.0, sum_y = 0.0, sum_yp = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sup = std::max(sup, std::fabs(y[i] - static_cast<double>(y_prime[i])));
        sum_y += y[i];
        sum_yp += static_cast<double>(y_prime[i]);
    }
    cert.checks[0] = {sup <= 1.0, sup, 1.0};

    const auto yp = as_real(y_prime);
    const RealLaw law = subset_sum_law(yp, p, kLawCap);
    const SlopeSup ss = small_ball_slope(law, lambda, sn);
    cert.slope_at = ss.at;
    cert.checks[1] = {ss.slope <= constants.C * L, ss.slope, constants.C * L};

    cert.levy_y_prime = levy(law, sn);
    const double ratio = cert.levy_y_prime / levy_y;
    cert.checks[2] = {ratio >= constants.c, ratio, constants.c};

    const double gap = std::fabs(sum_y - sum_yp);
    cert.checks[3] = {gap <= constants.sum_bound * sn, gap, constants.sum_bound * sn};
    return cert;
}

RoundingCertificate randomized_round(std::span<const double> y, double lambda, double p, double L,
                                     const RoundingConstants& constants, std::uint64_t budget, RngSeed seed) {
    check_inputs(y, p);
    require(L > 0, "randomized_round: L must be positive");
    require(constants.C > 0 && constants.c > 0 && constants.sum_bound > 0, "randomized_round: constants must be positive");
    require(budget >= 1, "randomized_round: budget must be positive");
    const double sn = std::sqrt(static_cast<double>(y.size()));
    const RealLaw law = subset_sum_law(y, p, kLawCap);
    const SlopeSup hyp = small_ball_slope(law, lambda, sn);
    if (hyp.slope > L * (1.0 + kHypothesisSlack)) throw HypothesisFailed(hyp.slope, L);
    const double levy_y = levy(law, sn);

    const CounterRng rng(seed);
    RoundingCertificate best;
    bool have_best = false;
    for (std::uint64_t k = 0; k < budget; ++k) {
        const auto cand = rounding_sample(y, rng, k);
        RoundingCertificate cert = evaluate_candidate(y, cand, lambda, p, L, constants, levy_y);
        cert.attempts = k + 1;
        if (cert.valid()) return cert;
        if (!have_best || cert.passed() > best.passed()) {
            best = std::move(cert);
            have_best = true;
        }
    }
    throw BudgetExhausted(budget, std::move(best));
}

RoundingReport verify_rounding(const RoundingCertificate& cert, double p) {
    const std::size_t n = cert.y.size();
    check_inputs(cert.y, p);
    if (cert.y_prime.size() != n) throw CertificateInvalid({1, 2, 3, 4});
    const double sn = std::sqrt(static_cast<double>(n));
    const double q = 1.0 - p;
    std::vector<double> weight(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        weight[k] = std::pow(p, static_cast<double>(k)) * std::pow(q, static_cast<double>(n - k));

    // Direct enumeration of the subset sums of y'.
    const std::uint64_t count = std::uint64_t{1} << n;
    std::vector<std::pair<double, double>> dist(count);
    std::vector<std::pair<double, double>> sums(count);
    for (std::uint64_t v = 0; v < count; ++v) {
        std::int64_t s = 0;
        std::size_t ones = 0;
        for (std::size_t i = 0; i < n; ++i)
            if ((v >> i) & 1U) {
                s += cert.y_prime[i];
                ++ones;
            }
        dist[v] = {std::fabs(static_cast<double>(s) - cert.lambda), weight[ones]};
        sums[v] = {static_cast<double>(s), weight[ones]};
    }
    const SlopeSup ss = slope_from_distances(std::move(dist), sn);
    std::sort(sums.begin(), sums.end());
    double levy_yp = 0.0, running = 0.0;
    for (std::size_t r = 0, l = 0; r < sums.size(); ++r) {
        running += sums[r].second;
        while (sums[r].first - sums[l].first > 2.0 * sn) running -= sums[l++].second;
        levy_yp = std::max(levy_yp, running);
    }
    const double levy_y = levy_brute<double>(cert.y, Rational(p), sn, std::nullopt);

    RoundingReport rep;
    rep.levy_y = levy_y;
    rep.levy_y_prime = levy_yp;
    double sup = 0.0, sum_y = 0.0, sum_yp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sup = std::max(sup, std::fabs(cert.y[i] - static_cast<double>(cert.y_prime[i])));
        sum_y += cert.y[i];
        sum_yp += static_cast<double>(cert.y_prime[i]);
    }
    const auto& k = cert.constants;
    const double gap = std::fabs(sum_y - sum_yp);
    rep.checks[0] = {sup <= 1.0, sup, 1.0};
    rep.checks[1] = {ss.slope <= k.C * cert.L, ss.slope, k.C * cert.L};
    rep.checks[2] = {levy_yp / levy_y >= k.c, levy_yp / levy_y, k.c};
    rep.checks[3] = {gap <= k.sum_bound * sn, gap, k.sum_bound * sn};

    auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); };
    std::vector<int> failed;
    for (std::size_t b = 0; b < 4; ++b)
        if (!rep.checks[b].pass || !cert.checks[b].pass || !close(rep.checks[b].measured, cert.checks[b].measured))
            failed.push_back(static_cast<int>(b) + 1);
    if (!failed.empty()) throw CertificateInvalid(std::move(failed));
    return rep;
}

YConstruction construct_Y(const Rational& p, std::span<const double> x, double L, double s, RngSeed seed,
                          const RoundingConstants& constants, std::uint64_t budget) {
    require(s >= -1 && s <= 0, "construct_Y: s must lie in [-1, 0]");
    require(L > 0, "construct_Y: L must be positive");
    const std::size_t n = x.size();
    require(n >= 1, "construct_Y: empty vector");
    double sq = 0.0;
    for (double v : x) sq += v * v;
    require(std::fabs(std::sqrt(sq) - 1.0) <= 1e-10, "construct_Y: x must be a unit vector");

    YConstruction out;
    out.L = L;
    out.s = s;
    out.T = threshold(x, ThresholdQuery{L, p}).T;
    const double sn = std::sqrt(static_cast<double>(n));
    std::vector<double> y(n);
    double sum_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = sn / out.T * x[i];
        sum_y += y[i];
    }
    const double slope_bound = L * out.T / sn;
    out.certificate = randomized_round(y, -s * sum_y, to_double(p), slope_bound, constants, budget, seed);
    out.Y = out.certificate.y_prime;
    out.sup_distance = out.certificate.checks[0].measured;
    out.slope = out.certificate.checks[1].measured;
    out.levy = out.certificate.levy_y_prime;
    out.sum_gap = out.certificate.checks[3].measured;
    out.properties_hold = out.sup_distance <= 1.0 && out.slope <= constants.C * slope_bound &&
                          out.levy >= constants.c / 2.0 * L * out.T && out.sum_gap <= constants.C * sn;
    return out;
}

}  // namespace rbsing
