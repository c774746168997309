#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "common/errors.hpp"
#include "concentration/concentration.hpp"
#include "geometry/geometry.hpp"
#include "rounding/rounding.hpp"

using namespace rbsing;

namespace {

// Smallest L for which y satisfies the rounding hypothesis at shift lambda.
double minimal_L(const std::vector<double>& y, double lambda, double p) {
    const RealLaw law = subset_sum_law(y, p);
    return small_ball_slope(law, lambda, std::sqrt(static_cast<double>(y.size()))).slope;
}

std::vector<double> random_real(CounterRng& rng, std::size_t n, double bound) {
    std::vector<double> y(n);
    for (auto& v : y) v = bound * (2.0 * rng.next_unit() - 1.0);
    return y;
}

std::vector<double> random_unit(CounterRng& rng, std::size_t n) {
    std::vector<double> x(n);
    double sq = 0;
    for (auto& v : x) {
        // Sum of uniforms: roughly Gaussian, so the vector is spread out.
        v = rng.next_unit() + rng.next_unit() + rng.next_unit() - 1.5;
        sq += v * v;
    }
    for (auto& v : x) v /= std::sqrt(sq);
    return x;
}

double sum_of(const std::vector<double>& y) {
    double s = 0;
    for (double v : y) s += v;
    return s;
}

}  // namespace

TEST_CASE("small_ball_slope") {
    // Atoms at 0 and 10 with mass 1/2 each, lambda = 0, t >= 1.
    const RealLaw law({0.0, 10.0}, {0.5, 0.5});
    const SlopeSup s = small_ball_slope(law, 0.0, 1.0);
    CHECK(s.slope == doctest::Approx(0.5));
    CHECK(s.at == 1.0);
    // From t_min = 4 the breakpoint at 10 gives 1/10 < 1/8.
    CHECK(small_ball_slope(law, 0.0, 4.0).slope == doctest::Approx(0.125));
    // Brute-force check against a fine grid.
    CounterRng rng(RngSeed{30, 0});
    for (int rep = 0; rep < 50; ++rep) {
        const auto y = random_real(rng, 6, 5.0);
        const double lambda = 3.0 * rng.next_unit();
        const RealLaw l = subset_sum_law(y, 0.3);
        const double t0 = std::sqrt(6.0);
        const SlopeSup got = small_ball_slope(l, lambda, t0);
        double grid_best = 0.0;
        for (int k = 0; k <= 4000; ++k) {
            const double t = t0 + 0.01 * k;
            grid_best = std::max(grid_best, small_ball(l, lambda, t) / t);
        }
        CHECK(got.slope >= grid_best - 1e-12);
        CHECK(got.slope == doctest::Approx(small_ball(l, lambda, got.at) / got.at));
    }
}

TEST_CASE("integer input rounds to itself") {
    const std::vector<double> y{3, -1, 4, 1, -5, 9};
    const double lambda = 0.5 * sum_of(y);
    const double L = minimal_L(y, lambda, 0.5);
    const RoundingCertificate c = randomized_round(y, lambda, 0.5, L, {}, 10, RngSeed{31, 0});
    CHECK(c.attempts == 1);
    CHECK(c.y_prime == std::vector<std::int64_t>{3, -1, 4, 1, -5, 9});
    CHECK(c.checks[0].measured == 0.0);
    CHECK(c.checks[3].measured == 0.0);
    CHECK(c.checks[2].measured == doctest::Approx(1.0));
    CHECK(c.valid());
}

TEST_CASE("half-integer input") {
    const std::vector<double> y(4, 0.5);
    const double lambda = 0.5 * sum_of(y);
    const double L = minimal_L(y, lambda, 0.5);
    const RoundingCertificate c = randomized_round(y, lambda, 0.5, L, {}, 100, RngSeed{32, 0});
    CHECK(c.valid());
    const CounterRng rng(RngSeed{32, 1});
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const auto s = rounding_sample(y, rng, k);
        for (auto v : s) CHECK((v == 0 || v == 1));
    }
}

TEST_CASE("rounding samples are unbiased") {
    CounterRng gen(RngSeed{33, 0});
    const auto y = random_real(gen, 8, 20.0);
    const CounterRng rng(RngSeed{33, 1});
    const std::uint64_t trials = 100000;
    std::vector<double> mean(8, 0.0), sq(8, 0.0);
    double gap_mean = 0.0;
    for (std::uint64_t k = 0; k < trials; ++k) {
        const auto s = rounding_sample(y, rng, k);
        double gap = 0.0;
        for (std::size_t i = 0; i < 8; ++i) {
            const double d = static_cast<double>(s[i]) - y[i];
            CHECK_MESSAGE(std::fabs(d) <= 1.0, "sup-norm bullet holds for every sample");
            mean[i] += d;
            sq[i] += d * d;
            gap += d;
        }
        gap_mean += gap;
    }
    for (std::size_t i = 0; i < 8; ++i) {
        const double f = y[i] - std::floor(y[i]);
        const double var = f * (1 - f);
        CHECK(var <= 0.25);
        CHECK(std::fabs(mean[i] / trials) <= 4.0 * std::sqrt(var / trials) + 1e-12);
        CHECK(sq[i] / trials == doctest::Approx(var).epsilon(0.05));
    }
    double total_var = 0.0;
    for (double v : y) total_var += (v - std::floor(v)) * (1 - (v - std::floor(v)));
    CHECK(std::fabs(gap_mean / trials) <= 4.0 * std::sqrt(total_var / trials));
}

TEST_CASE("loosening the constants never lowers the pass rate") {
    CounterRng gen(RngSeed{34, 0});
    for (int rep = 0; rep < 10; ++rep) {
        const auto y = random_real(gen, 10, 30.0);
        const double lambda = 0.5 * sum_of(y);
        const double L = minimal_L(y, lambda, 0.5);
        const double levy_y = levy(subset_sum_law(y, 0.5), std::sqrt(10.0));
        const RoundingConstants tight{1.5, 0.6, 0.3};
        const RoundingConstants loose{4.0, 0.3, 0.8};
        const RoundingConstants looser{8.0, 0.125, 1.0444659357341870};
        const CounterRng rng(RngSeed{34, static_cast<std::uint64_t>(rep) + 1});
        int pass_t = 0, pass_l = 0, pass_ll = 0;
        for (std::uint64_t k = 0; k < 200; ++k) {
            const auto s = rounding_sample(y, rng, k);
            const bool a = evaluate_candidate(y, s, lambda, 0.5, L, tight, levy_y).valid();
            const bool b = evaluate_candidate(y, s, lambda, 0.5, L, loose, levy_y).valid();
            const bool c = evaluate_candidate(y, s, lambda, 0.5, L, looser, levy_y).valid();
            CHECK((!a || b));
            CHECK((!b || c));
            pass_t += a;
            pass_l += b;
            pass_ll += c;
        }
        CHECK(pass_t <= pass_l);
        CHECK(pass_l <= pass_ll);
    }
}

TEST_CASE("random certified roundings at n = 12") {
    CounterRng gen(RngSeed{35, 0});
    int ok = 0;
    std::vector<RoundingCertificate> certs;
    for (std::uint64_t rep = 0; rep < 300; ++rep) {
        const auto y = random_real(gen, 12, 50.0);
        const double lambda = 0.5 * sum_of(y);
        const double L = minimal_L(y, lambda, 0.5);
        try {
            certs.push_back(randomized_round(y, lambda, 0.5, L, {}, 10000, RngSeed{35, rep + 1}));
            ++ok;
        } catch (const BudgetExhausted&) {
        }
    }
    CHECK(ok >= 297);
    int verified = 0;
    for (std::size_t i = 0; i < certs.size() && i < 100; ++i) {
        CHECK_NOTHROW(verify_rounding(certs[i], 0.5));
        ++verified;
    }
    CHECK(verified == 100);
}

TEST_CASE("verify_rounding rejects tampering") {
    CounterRng gen(RngSeed{36, 0});
    const auto y = random_real(gen, 8, 10.0);
    const double lambda = 0.5 * sum_of(y);
    const double L = minimal_L(y, lambda, 0.5);
    const RoundingCertificate c = randomized_round(y, lambda, 0.5, L, {}, 10000, RngSeed{36, 1});
    const RoundingReport rep = verify_rounding(c, 0.5);
    CHECK(rep.levy_y == doctest::Approx(c.levy_y).epsilon(1e-12));
    CHECK(rep.levy_y_prime == doctest::Approx(c.levy_y_prime).epsilon(1e-12));

    RoundingCertificate bad = c;
    bad.y_prime[0] += 3;
    try {
        verify_rounding(bad, 0.5);
        FAIL("tampered certificate accepted");
    } catch (const CertificateInvalid& e) {
        const auto& f = e.failed_bullets();
        CHECK(std::find(f.begin(), f.end(), 1) != f.end());
    }

    RoundingCertificate lied = c;
    lied.checks[3].measured += 0.5;
    CHECK_THROWS_AS(verify_rounding(lied, 0.5), CertificateInvalid);
}

TEST_CASE("rounding errors") {
    const std::vector<double> y{0.3, 1.7, -2.2, 4.5, 0.9};
    const double lambda = 0.5 * sum_of(y);
    const double L = minimal_L(y, lambda, 0.5);
    CHECK_THROWS_AS(randomized_round(y, lambda, 0.5, 0.5 * L), HypothesisFailed);
    CHECK_NOTHROW(randomized_round(y, lambda, 0.5, L));
    // The sum gap of a non-integer sum can never be zero.
    try {
        randomized_round(y, lambda, 0.5, L, RoundingConstants{8.0, 0.125, 1e-9}, 50, RngSeed{37, 0});
        FAIL("expected exhaustion");
    } catch (const BudgetExhausted& e) {
        CHECK(e.attempts() == 50);
        CHECK(e.best_partial().passed() == 3);
        CHECK_FALSE(e.best_partial().checks[3].pass);
    }
    CHECK_THROWS_AS(randomized_round(std::vector<double>(26, 0.5), 0.0, 0.5, 1.0), BudgetExceeded);
}

TEST_CASE("construct_Y") {
    const std::vector<double> e1{1.0};
    const YConstruction one = construct_Y(Rational(1, 2), e1, 1.0, -0.5, RngSeed{38, 0});
    CHECK(one.T == 1.0);
    CHECK(one.Y.size() == 1);
    CHECK(std::fabs(1.0 / one.T - static_cast<double>(one.Y[0])) <= 1.0);
    CHECK(one.properties_hold);

    CounterRng gen(RngSeed{38, 1});
    int done = 0;
    for (std::uint64_t rep = 0; done < 20; ++rep) {
        const auto x = random_unit(gen, 12);
        if (classify_compressible(x, IncompParams{0.25, 0.3}) != Compressibility::Incomp) continue;
        const double L = 1.0 + 20.0 * gen.next_unit();
        const double s = -gen.next_unit();
        const YConstruction yc = construct_Y(Rational(1, 2), x, L, s, RngSeed{38, rep + 2});
        CHECK(L * yc.T >= std::pow(0.5, 12) * (1 - 1e-12));
        CHECK(yc.properties_hold);
        CHECK(yc.sup_distance <= 1.0);
        for (std::size_t i = 0; i < 12; ++i)
            CHECK(std::fabs(std::sqrt(12.0) / yc.T * x[i] - static_cast<double>(yc.Y[i])) <= 1.0);
        CHECK_NOTHROW(verify_rounding(yc.certificate, 0.5));
        ++done;
    }
    CHECK_THROWS_AS(construct_Y(Rational(1, 2), e1, 1.0, 0.5, RngSeed{}), InvalidArgument);
}
