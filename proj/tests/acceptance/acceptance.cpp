// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "averaging/averaging.hpp"
#include "common/errors.hpp"
#include "common/stats.hpp"
#include "concentration/concentration.hpp"
#include "expcli/experiments.hpp"
#include "model/rng.hpp"

using namespace rbsing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

Json load_fixtures() {
    std::ifstream in(RBSING_FIXTURES);
    if (!in) return Json::object();
    return Json::parse(in);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// -- 1 ------------------------------------------------------------------------

// Laplace expansion along the first row.
std::int64_t cofactor_det(const std::vector<std::int64_t>& a, std::size_t n) {
    if (n == 1) return a[0];
    std::int64_t det = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::int64_t> minor;
        for (std::size_t r = 1; r < n; ++r)
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) minor.push_back(a[r * n + k]);
        const std::int64_t term = a[c] * cofactor_det(minor, n - 1);
        det += (c % 2 == 0) ? term : -term;
    }
    return det;
}

Rational naive_singularity(std::size_t n, const Rational& p, bool sign) {
    const std::size_t cells = n * n;
    Rational total = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
        std::vector<std::int64_t> a(cells);
        Rational w = 1;
        for (std::size_t i = 0; i < cells; ++i) {
            const bool bit = (mask >> i) & 1U;
            a[i] = sign ? (bit ? 1 : -1) : (bit ? 1 : 0);
            w *= sign ? Rational(1, 2) : (bit ? p : 1 - p);
        }
        if (cofactor_det(a, n) == 0) total += w;
    }
    total.canonicalize();
    return total;
}

Outcome exact_enumeration() {
    Outcome o;
    const Rational half(1, 2);
    o.require(enum_singularity(2, half, false) == make_rational(5, 8), "bernoulli n=2 != 5/8");
    o.require(enum_singularity(2, half, true) == half, "sign n=2 != 1/2");
    for (std::size_t n : {3u, 4u}) {
        const Rational got = enum_singularity(n, half, false), want = naive_singularity(n, half, false);
        o.require(got == want, "bernoulli n=" + std::to_string(n) + ": " + to_string(got) + " vs " + to_string(want));
    }
    const Rational got = enum_singularity(3, half, true), want = naive_singularity(3, half, true);
    o.require(got == want, "sign n=3: " + to_string(got) + " vs " + to_string(want));
    if (o.pass)
        o.detail = "n=3 " + to_string(enum_singularity(3, half, false)) + ", n=4 " + to_string(enum_singularity(4, half, false)) +
                   ", sign n=3 " + to_string(got);
    return o;
}

// -- 2 ------------------------------------------------------------------------

Outcome mc_vs_exact() {
    Outcome o;
    const double exact = to_double(enum_singularity(3, Rational(1, 2), false));
    const CountEstimate e = mc_singularity(3, Rational(1, 2), Rational(0), false, 1000000, 20260101, 1);
    const double est = static_cast<double>(e.hits) / static_cast<double>(e.trials);
    const double sigma = binomial_sigma(exact, e.trials);
    const Interval ci = wilson_interval(e.hits, e.trials);
    o.require(std::fabs(est - exact) <= 4.0 * sigma, "outside 4 sigma");
    o.detail += "estimate " + fmt(est) + " CI [" + fmt(ci.low) + ", " + fmt(ci.high) + "], exact " + fmt(exact) +
                ", |diff|/sigma " + fmt(std::fabs(est - exact) / sigma);
    return o;
}

// -- 3 ------------------------------------------------------------------------

Outcome concentration_oracle() {
    Outcome o;
    CounterRng rng(RngSeed{303, 0});
    const Rational ps[3] = {make_rational(1, 10), make_rational(3, 10), make_rational(1, 2)};
    double worst = 0.0;
    std::size_t exact_mismatch = 0;
    for (int rep = 0; rep < 500; ++rep) {
        const auto n = static_cast<std::size_t>(rng.next_in(1, 12));
        std::vector<std::int64_t> x(n);
        for (auto& v : x) v = rng.next_in(-30, 30);
        const std::vector<double> xd(x.begin(), x.end());
        const Rational& p = ps[rng.next_below(3)];
        const double ts[] = {0.0, 0.5, 1.0, 2.5, std::sqrt(static_cast<double>(n)), 7.0, 40.0};
        const double t = ts[rng.next_below(7)];
        const Rational lr = levy(walk_pmf<Rational>(x, p), t);
        const Rational br = levy_brute<Rational>(xd, p, t);
        exact_mismatch += lr != br;
        const double lf = levy(walk_pmf<double>(x, p), t);
        const double bf = levy_brute<double>(xd, p, t);
        worst = std::max(worst, std::fabs(lf - bf));
    }
    o.require(exact_mismatch == 0, std::to_string(exact_mismatch) + " rational mismatches");
    o.require(worst <= 1e-12, "float gap " + fmt(worst));
    if (o.pass) o.detail = "500 vectors, rational exact, max float gap " + fmt(worst);
    return o;
}

// -- 4 ------------------------------------------------------------------------

Outcome threshold_exactness() {
    Outcome o;
    const std::vector<double> e1{1.0};
    o.require(threshold(e1, ThresholdQuery{1.0, Rational(1, 2)}).T == 1.0, "T(e1, L=1) != 1");
    o.require(threshold(e1, ThresholdQuery{4.0, Rational(1, 2)}).T == 0.125, "T(e1, L=4) != 1/8");
    CounterRng rng(RngSeed{404, 0});
    std::size_t violations = 0, below_floor = 0;
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> x(10);
        double sq = 0;
        for (auto& v : x) {
            v = 2.0 * rng.next_unit() - 1.0;
            sq += v * v;
        }
        for (auto& v : x) v /= std::sqrt(sq);
        double prev = INFINITY;
        for (int k = 0; k < 20; ++k) {
            const double L = 0.5 * std::pow(1.5, k);
            const double T = threshold(x, ThresholdQuery{L, Rational(1, 2)}).T;
            violations += T > prev;
            below_floor += T < std::min(1.0, std::pow(0.5, 10) / L);
            prev = T;
        }
    }
    o.require(violations == 0, std::to_string(violations) + " increases in L");
    o.require(below_floor == 0, std::to_string(below_floor) + " values below (1-p)^n/L");
    if (o.pass) o.detail = "50 vectors x 20 L values monotone, floor respected";
    return o;
}

// -- 5 ------------------------------------------------------------------------

using WF = WindowedFunction<double>;
using WQ = WindowedFunction<Rational>;

WF random_positive(CounterRng& rng, std::int64_t offset, std::size_t size) {
    std::vector<double> v(size);
    for (auto& x : v) x = rng.next_unit() + 0.01;
    return WF(offset, std::move(v));
}

Outcome averaging_engine() {
    Outcome o;
    CounterRng rng(RngSeed{505, 0});

    // l1 preservation, with a small window every fourth step to force truncation.
    double worst = 0.0, booked = 0.0;
    WF f = random_positive(rng, 0, 200);
    for (int k = 0; k < 1000; ++k) {
        if (k % 100 == 0) f = random_positive(rng, rng.next_in(-50, 50), 200);
        const double before = f.sum() + f.truncation_loss();
        const std::size_t cap = k % 4 == 0 ? 256 : kDefaultWindowCap;
        f = average_step(f, rng.next_in(-60, 60), rng.next_unit(), cap);
        worst = std::max({worst, std::fabs(f.sum() + f.truncation_loss() - before), f.mass_drift()});
        booked += f.truncation_loss();
    }
    o.require(worst <= 1e-9, "l1 drift " + fmt(worst));
    o.require(booked > 0, "truncation never exercised");

    // Oracle: fold equals the 2^l sum, exactly.
    std::size_t oracle_bad = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const auto l = static_cast<std::size_t>(rng.next_in(0, 12));
        std::vector<std::int64_t> x(l);
        for (auto& v : x) v = rng.next_in(-25, 25);
        std::vector<Rational> vals(static_cast<std::size_t>(rng.next_in(1, 5)));
        for (auto& v : vals) v = make_rational(static_cast<long>(rng.next_in(0, 4)), 5);
        const WQ f0(rng.next_in(-3, 3), vals);
        const Rational p = make_rational(static_cast<long>(rng.next_in(1, 9)), 10);
        const WQ got = fold_average(f0, x, p);
        const auto want = direct_average(f0, x, p, -320, 320);
        for (std::int64_t t = -320; t <= 320; ++t) oracle_bad += got(t) != want[static_cast<std::size_t>(t + 320)];
    }
    o.require(oracle_bad == 0, std::to_string(oracle_bad) + " oracle mismatches");

    // qZ closure.
    std::size_t off_lattice = 0;
    for (std::int64_t q : {2, 3, 5, 7}) {
        const AdmissibleSet A = theorem_b_domain(10, 0.5, 20);
        std::vector<std::int64_t> X(A.n());
        for (std::size_t i = 0; i < A.n(); ++i) {
            do X[i] = A.sets[i].sample(rng);
            while (X[i] % q != 0);
        }
        std::vector<double> v(static_cast<std::size_t>(2 * q + 1), 0.0);
        v.front() = 0.5;
        v.back() = 0.5;
        const AveragingRun run = average_sequence(WF(-q, v), A, 0.3, X, {});
        const WF& g = run.final_function();
        for (std::int64_t t = g.offset(); t < g.end(); ++t) off_lattice += (((t % q) + q) % q != 0) && g(t) != 0.0;
    }
    o.require(off_lattice == 0, std::to_string(off_lattice) + " mass points off qZ");

    // l2 mixing identity.
    double l2_gap = 0.0, min_drop = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const WF a = random_positive(rng, rng.next_in(-10, 10), static_cast<std::size_t>(rng.next_in(1, 40)));
        const WF b = random_positive(rng, rng.next_in(-10, 10), static_cast<std::size_t>(rng.next_in(1, 40)));
        const Ell2Mix e = ell2_mix_identity(a, b, rng.next_unit());
        l2_gap = std::max(l2_gap, std::fabs(e.lhs - (e.rhs - e.drop)) / std::max(1.0, e.rhs));
        min_drop = std::min(min_drop, e.rhs - e.lhs);
    }
    o.require(l2_gap <= 1e-12, "l2 identity gap " + fmt(l2_gap));
    o.require(min_drop >= -1e-12, "negative drop " + fmt(min_drop));

    // Greedy spike chain.
    std::size_t chain_bad = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const AdmissibleSet A = theorem_b_domain(12, 0.5, 8);
        const AveragingRun run = average_sequence(seed_function(12, 140), A, 0.1 + 0.08 * static_cast<double>(k % 11), 12,
                                                  RngSeed{506, k}, all_steps(12));
        try {
            const SpikeChain c = greedy_spike_chain(run);
            for (std::size_t i = 1; i <= 12; ++i)
                chain_bad += c.value[i - 1] < c.value[i] * (1 - 1e-12) || c.t[i] != c.t[i - 1] - c.v[i - 1] * run.X[i - 1];
        } catch (const PropertyViolation&) {
            ++chain_bad;
        }
    }
    o.require(chain_bad == 0, std::to_string(chain_bad) + " chain violations");
    if (o.pass)
        o.detail = "l1 drift " + fmt(worst) + ", 100 oracle instances exact, qZ closed, l2 gap " + fmt(l2_gap) +
                   ", 100 chains monotone";
    return o;
}

// -- 6 to 9: experiments against the pinned fixtures ----------------------------

Outcome experiment_checks(const std::string& name, const Json& fixtures,
                          std::function<void(const ExperimentResult&, Outcome&)> extra = {}) {
    Outcome o;
    const ExperimentConfig cfg = default_config(name);
    const ExperimentResult res = run_experiment(cfg, fixtures);
    for (const auto& line : check_experiment(cfg, res)) o.require(line.pass, line.name + " (" + line.detail + ")");
    if (extra) extra(res, o);
    if (o.pass) {
        for (const auto& line : check_experiment(cfg, res))
            if (!line.detail.empty() && line.detail.size() < 90) o.detail += (o.detail.empty() ? "" : "; ") + line.detail;
    }
    return o;
}

Outcome theorem_b(const Json& fx) { return experiment_checks("theorem-b", fx); }

Outcome rounding(const Json& fx) {
    return experiment_checks("rounding-suite", fx, [](const ExperimentResult& r, Outcome& o) {
        std::size_t verified = 0, mismatches = 0;
        for (const auto& c : r.artifacts.certificates) {
            if (verified == 100) break;
            try {
                verify_rounding(c, 0.5);
            } catch (const CertificateInvalid&) {
                ++mismatches;
            }
            ++verified;
        }
        o.require(verified == 100, "only " + std::to_string(verified) + " certificates");
        o.require(mismatches == 0, std::to_string(mismatches) + " verifier mismatches");
        for (const auto& c : r.artifacts.certificates) o.require(c.attempts <= 10000, "attempt budget exceeded");
    });
}

Outcome smin_tail(const Json& fx) { return experiment_checks("smin-tail", fx); }
Outcome normal_threshold(const Json& fx) { return experiment_checks("normal-threshold", fx); }

// -- 10 -----------------------------------------------------------------------

Outcome reproducibility() {
    Outcome o;
    for (const auto& name : experiment_names()) {
        ExperimentConfig c = default_config(name);
        // Keep the two slowest defaults short; the contract does not depend on the budget.
        if (name == "smin-tail") c.trials = 200;
        if (name == "mc-singularity") c.trials = 200000;
        if (name == "enum-singularity") c.n = {4};
        c.workers = 1;
        const std::string a = points_json(run_experiment(c).record.points).dump();
        c.workers = 8;
        const std::string b = points_json(run_experiment(c).record.points).dump();
        o.require(a == b, name + " differs");
    }
    if (o.pass) o.detail = "6 experiments, workers 1 vs 8";
    return o;
}

}  // namespace

int main() {
    const Json fx = load_fixtures();
    struct Criterion {
        int id;
        const char* name;
        double limit_sec;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "exact enumeration", 5, exact_enumeration},
        {2, "MC vs exact singularity", 30, mc_vs_exact},
        {3, "concentration oracle equivalence", 60, concentration_oracle},
        {4, "threshold exactness", 600, threshold_exactness},
        {5, "averaging engine", 120, averaging_engine},
        {6, "exceedance sweep desk check", 600, [&] { return theorem_b(fx); }},
        {7, "certified rounding", 300, [&] { return rounding(fx); }},
        {8, "s_min tail", 300, [&] { return smin_tail(fx); }},
        {9, "normal-vector threshold", 600, [&] { return normal_threshold(fx); }},
        {10, "reproducibility across workers", 1800, reproducibility},
    };
    bool all = true;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (sec > c.limit_sec) o.require(false, "took " + fmt(sec) + " s, limit " + fmt(c.limit_sec) + " s");
        all = all && o.pass;
        std::printf("%s criterion %d: %s [%.2f s] %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, sec, o.detail.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
