#include "concentration/concentration.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "common/errors.hpp"
#include "common/stats.hpp"
#include "model/model.hpp"

namespace rbsing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t saturating_pow2(std::size_t n) {
    return n >= 63 ? std::numeric_limits<std::size_t>::max() : (std::size_t{1} << n);
}

void check_probability(const Rational& p) { require(p >= 0 && p <= 1, "p must lie in [0, 1]"); }

}  // namespace

template <typename Prob>
IntegerPmf<Prob> walk_pmf(std::span<const std::int64_t> x, const Rational& p, std::size_t support_cap) {
    check_probability(p);
    std::size_t span = 0;
    for (auto v : x) {
        const auto mag = static_cast<std::size_t>(v < 0 ? -v : v);
        span = span > std::numeric_limits<std::size_t>::max() - mag ? std::numeric_limits<std::size_t>::max()
                                                                     : span + mag;
    }
    const std::size_t projected =
        std::min(saturating_pow2(x.size()), span == std::numeric_limits<std::size_t>::max() ? span : span + 1);
    if (projected > support_cap) throw BudgetExceeded("walk_pmf: support too large", projected, support_cap);

    const Prob pp = prob_from_rational<Prob>(p);
    auto law = IntegerPmf<Prob>::point_mass(0);
    for (auto v : x) law = law.convolve_two_point(v, pp);
    return law;
}

template IntegerPmf<Rational> walk_pmf<Rational>(std::span<const std::int64_t>, const Rational&, std::size_t);
template IntegerPmf<double> walk_pmf<double>(std::span<const std::int64_t>, const Rational&, std::size_t);

RealLaw subset_sum_law(std::span<const double> y, double p, std::size_t support_cap) {
    require(p >= 0 && p <= 1, "p must lie in [0, 1]");
    auto law = RealLaw::point_mass(0.0);
    for (double v : y) {
        law = law.convolve_two_point(v, p);
        if (law.size() > support_cap) throw BudgetExceeded("subset_sum_law: support too large", law.size(), support_cap);
    }
    return law;
}

template <typename Prob>
Prob levy_brute(std::span<const double> x, const Rational& p, double t, std::optional<double> lambda) {
    check_probability(p);
    require(t >= 0, "levy_brute: t must be non-negative");
    const std::size_t n = x.size();
    if (n > kMaxBruteForceDimension) throw BudgetExceeded("levy_brute: dimension too large", n, kMaxBruteForceDimension);

    const Prob pp = prob_from_rational<Prob>(p);
    const Prob qq = Prob(1) - pp;
    std::vector<Prob> weight(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        Prob w = 1;
        for (std::size_t i = 0; i < k; ++i) w *= pp;
        for (std::size_t i = k; i < n; ++i) w *= qq;
        weight[k] = w;
    }

    const std::uint64_t count = std::uint64_t{1} << n;
    if (lambda) {
        Prob total = 0;
        for (std::uint64_t v = 0; v < count; ++v) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if ((v >> i) & 1U) s += x[i];
            if (std::fabs(s - *lambda) <= t) total += weight[static_cast<std::size_t>(std::popcount(v))];
        }
        return total;
    }

    std::vector<std::pair<double, std::size_t>> sums(count);
    for (std::uint64_t v = 0; v < count; ++v) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if ((v >> i) & 1U) s += x[i];
        sums[v] = {s, static_cast<std::size_t>(std::popcount(v))};
    }
    std::sort(sums.begin(), sums.end());
    Prob best = 0;
    Prob running = 0;
    std::size_t left = 0;
    for (std::size_t right = 0; right < sums.size(); ++right) {
        running += weight[sums[right].second];
        while (sums[right].first - sums[left].first > 2.0 * t) {
            running -= weight[sums[left].second];
            ++left;
        }
        if (running > best) best = running;
    }
    return best;
}

template Rational levy_brute<Rational>(std::span<const double>, const Rational&, double, std::optional<double>);
template double levy_brute<double>(std::span<const double>, const Rational&, double, std::optional<double>);

SmallBallEstimate shifted_small_ball(std::span<const double> y, double lambda, double p, double t,
                                     std::uint64_t mc_trials, RngSeed seed) {
    require(p >= 0 && p <= 1, "p must lie in [0, 1]");
    require(t >= 0, "shifted_small_ball: t must be non-negative");
    SmallBallEstimate out;
    if (y.size() <= kMaxBruteForceDimension) {
        const RealLaw law = subset_sum_law(y, p, std::numeric_limits<std::size_t>::max());
        out.value = std::clamp(small_ball(law, lambda, t), 0.0, 1.0);
        out.ci_low = out.ci_high = out.value;
        out.exact = true;
        return out;
    }
    require(mc_trials > 0, "shifted_small_ball: need at least one Monte Carlo trial");
    const BernoulliCoin coin{Rational(p)};
    const CounterRng rng(seed);
    const std::size_t n = y.size();
    std::uint64_t hits = 0;
    for (std::uint64_t trial = 0; trial < mc_trials; ++trial) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (coin(rng.at(trial * n + i))) s += y[i];
        if (std::fabs(s - lambda) <= t) ++hits;
    }
    const Interval ci = wilson_interval(hits, mc_trials);
    out.value = static_cast<double>(hits) / static_cast<double>(mc_trials);
    out.ci_low = ci.low;
    out.ci_high = ci.high;
    out.exact = false;
    out.trials = mc_trials;
    return out;
}

double concentration_radius(const RealLaw& law, double level) {
    const auto pts = law.points();
    const auto prb = law.probs();
    if (pts.empty()) return kInf;
    if (law.max_atom() > level) return -1.0;
    std::vector<double> prefix(pts.size() + 1, 0.0);
    std::partial_sum(prb.begin(), prb.end(), prefix.begin() + 1);
    // Smallest gap of a window whose mass exceeds `level`; L(Z, r) <= level exactly for r < gap / 2.
    double best_gap = kInf;
    std::size_t left = 0;
    for (std::size_t right = 0; right < pts.size(); ++right) {
        while (left < right && prefix[right + 1] - prefix[left + 1] > level) ++left;
        if (prefix[right + 1] - prefix[left] > level) best_gap = std::min(best_gap, pts[right] - pts[left]);
    }
    return best_gap / 2.0;
}

template <typename Point>
ThresholdResult threshold_of_law(const DiscreteLaw<Point, double>& law, double L, double floor_value) {
    require(L > 0, "threshold: L must be positive");
    ThresholdResult out;
    double u = std::min(1.0, levy(law, 1.0) / L);
    while (true) {
        ++out.iterations;
        const double level = levy_left_limit(law, u);
        const double w = level / L;
        if (w >= u) {
            out.T = u;
            out.level = level;
            break;
        }
        u = w;
    }
    out.T = std::max(out.T, std::min(1.0, floor_value));
    return out;
}

template ThresholdResult threshold_of_law<std::int64_t>(const FloatPmf&, double, double);
template ThresholdResult threshold_of_law<double>(const RealLaw&, double, double);

namespace {

double threshold_floor(std::size_t n, const Rational& p, double L) {
    return std::pow(1.0 - to_double(p), static_cast<double>(n)) / L;
}

}  // namespace

ThresholdResult threshold(std::span<const std::int64_t> x, const ThresholdQuery& q) {
    require(q.L > 0, "threshold: L must be positive");
    const FloatPmf law = walk_pmf<double>(x, q.p);
    return threshold_of_law(law, q.L, threshold_floor(x.size(), q.p, q.L));
}

ThresholdResult threshold(std::span<const double> x, const ThresholdQuery& q) {
    require(q.L > 0, "threshold: L must be positive");
    check_probability(q.p);
    if (x.size() > kMaxBruteForceDimension)
        throw BudgetExceeded("threshold: exact law needs n <= 25", x.size(), kMaxBruteForceDimension);
    const RealLaw law = subset_sum_law(x, to_double(q.p), std::size_t{1} << 25);
    return threshold_of_law(law, q.L, threshold_floor(x.size(), q.p, q.L));
}

double lattice_distance(std::span<const double> v) {
    double sq = 0.0;
    for (double a : v) {
        const double r = a - std::nearbyint(a);
        sq += r * r;
    }
    return std::sqrt(sq);
}

double lcd(std::span<const double> x, const LcdParams& params) {
    require(params.c_prime > 0 && params.c_prime < 1, "lcd: c' must lie in (0, 1)");
    require(params.c > 0, "lcd: c must be positive");
    require(params.grid > 0 && params.lambda_max > 0, "lcd: grid and lambda_max must be positive");
    require(!x.empty(), "lcd: empty vector");
    double norm_sq = 0.0;
    for (double a : x) norm_sq += a * a;
    require(std::fabs(std::sqrt(norm_sq) - 1.0) <= 1e-10, "lcd: x must be a unit vector");

    const double cap = params.c * std::sqrt(static_cast<double>(x.size()));
    std::vector<double> scaled(x.size());
    auto holds = [&](double lambda) {
        for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = lambda * x[i];
        return lattice_distance(scaled) <= std::min(params.c_prime * lambda, cap);
    };

    double prev = 0.0;
    const auto steps = static_cast<std::uint64_t>(std::floor(params.lambda_max / params.grid));
    for (std::uint64_t k = 1; k <= steps + 1; ++k) {
        const double lambda = std::min(static_cast<double>(k) * params.grid, params.lambda_max);
        if (holds(lambda)) {
            double lo = prev, hi = lambda;
            while (hi - lo > 1e-9) {
                const double mid = 0.5 * (lo + hi);
                (holds(mid) ? hi : lo) = mid;
            }
            return hi;
        }
        prev = lambda;
        if (lambda >= params.lambda_max) break;
    }
    return kInf;
}

double rogozin_bound(std::span<const RogozinTerm> terms, double r, double C) {
    require(C > 0, "rogozin_bound: C must be positive");
    double denom = 0.0;
    for (const auto& term : terms) {
        require(term.radius <= r, "rogozin_bound: r must dominate every r_i");
        require(term.one_minus_levy >= 0 && term.one_minus_levy <= 1, "rogozin_bound: 1 - L_i must lie in [0, 1]");
        denom += term.one_minus_levy * term.radius * term.radius;
    }
    if (denom <= 0.0) return kInf;
    return C * r / std::sqrt(denom);
}

double tensorization_bound(const TensorizationArgsV1& args) {
    require(args.K > 0 && args.C > 0, "tensorization_bound: K and C must be positive");
    require(args.eps >= args.eps0, "tensorization_bound: eps must be at least eps0");
    return std::pow(args.C * args.K * args.eps, static_cast<double>(args.m));
}

double tensorization_bound(const TensorizationArgsV2& args) {
    require(args.eps > 0 && args.eps <= 1, "tensorization_bound: eps must lie in (0, 1]");
    require(args.tau >= 0 && args.tau <= 1, "tensorization_bound: tau must lie in [0, 1]");
    require(args.eta > 0, "tensorization_bound: eta must be positive");
    const double m = static_cast<double>(args.m);
    const double em = args.eps * m;
    const double tail = m - em;
    if (args.tau == 0.0 && tail > 0) return 0.0;
    return std::pow(std::exp(1.0) / args.eps, em) * std::pow(args.tau, tail);
}

}  // namespace rbsing
