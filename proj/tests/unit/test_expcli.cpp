#include "doctest.h"

#include <cmath>
#include <string>

#include "common/errors.hpp"
#include "common/stats.hpp"
#include "expcli/experiments.hpp"

using namespace rbsing;

namespace {

ExperimentConfig make(const std::string& name, std::initializer_list<std::pair<const char*, const char*>> kv) {
    ExperimentConfig c = default_config(name);
    for (const auto& [k, v] : kv) set_param(c, k, v);
    return c;
}

}  // namespace

TEST_CASE("enum_singularity small cases") {
    CHECK(enum_singularity(2, Rational(1, 2), false) == make_rational(5, 8));
    CHECK(enum_singularity(2, Rational(1, 2), true) == make_rational(1, 2));
    for (const auto& p : {make_rational(3, 10), make_rational(1, 7), Rational(0), Rational(1)})
        CHECK(enum_singularity(1, p, false) == 1 - p);
    // p = 1: the all-ones matrix is singular for n >= 2.
    CHECK(enum_singularity(3, Rational(1), false) == 1);
    CHECK(enum_singularity(4, Rational(1, 2), false, 1) == enum_singularity(4, Rational(1, 2), false, 3));
    CHECK_THROWS_AS(enum_singularity(5, Rational(1, 2), false), BudgetExceeded);
}

TEST_CASE("mc_singularity") {
    const CountEstimate zero = mc_singularity(3, Rational(0), Rational(0), false, 500, 1, 1);
    CHECK(zero.hits == 500);
    const double exact = to_double(enum_singularity(3, Rational(1, 2), false));
    const CountEstimate e = mc_singularity(3, Rational(1, 2), Rational(0), false, 100000, 2, 1);
    const double est = static_cast<double>(e.hits) / 1e5;
    CHECK(std::fabs(est - exact) <= 4.0 * binomial_sigma(exact, 100000));
    const CountEstimate e3 = mc_singularity(3, Rational(1, 2), Rational(0), false, 100000, 2, 3);
    CHECK(e3.hits == e.hits);
    // The sign model at n = 2 is singular with probability 1/2.
    const CountEstimate s = mc_singularity(2, Rational(1, 2), Rational(0), true, 100000, 3, 2);
    CHECK(std::fabs(static_cast<double>(s.hits) / 1e5 - 0.5) <= 4.0 * binomial_sigma(0.5, 100000));
    // The shifted model with s = -1/2 is the sign model scaled by 1/2.
    const CountEstimate sh = mc_singularity(2, Rational(1, 2), make_rational(-1, 2), false, 100000, 4, 2);
    CHECK(std::fabs(static_cast<double>(sh.hits) / 1e5 - 0.5) <= 4.0 * binomial_sigma(0.5, 100000));
}

TEST_CASE("singularity decreases from n = 4 to n = 8") {
    const CountEstimate a = mc_singularity(4, Rational(1, 2), Rational(0), false, 50000, 5, 2);
    const CountEstimate b = mc_singularity(8, Rational(1, 2), Rational(0), false, 50000, 5, 2);
    const Interval ia = wilson_interval(a.hits, a.trials), ib = wilson_interval(b.hits, b.trials);
    CHECK(ib.high < ia.low);
}

TEST_CASE("smin tail") {
    const auto sm = smin_samples(12, Rational(1, 2), make_rational(-1, 2), 200, 6, 2);
    const double rn = std::sqrt(12.0);
    // s_min <= ||M|| <= n for entries in [-1, 1]; t = 10 n sqrt(n) covers everything.
    for (double v : sm) CHECK(v <= 10.0 * 12.0 * rn / rn);
    double prev = -1;
    for (double t : {0.01, 0.1, 0.3, 1.0, 3.0}) {
        std::size_t hits = 0;
        for (double v : sm) hits += v <= t / rn;
        CHECK(static_cast<double>(hits) >= prev);
        prev = static_cast<double>(hits);
    }
    CHECK(smin_samples(12, Rational(1, 2), make_rational(-1, 2), 200, 6, 1) == sm);
}

TEST_CASE("normal threshold samples") {
    const auto s = normal_threshold_samples(6, Rational(1, 2), Rational(0), 4.0, 0.25, 0.3, 400, 7, 2);
    std::size_t degenerate = 0, deficient = 0;
    for (const auto& x : s) {
        degenerate += x.degenerate;
        deficient += x.rank_deficient;
        CHECK(x.degenerate == x.rank_deficient);
        if (!x.degenerate) CHECK(x.T >= std::pow(0.5, 6) / 4.0 * (1 - 1e-12));
    }
    CHECK(degenerate == deficient);
    CHECK(degenerate > 0);
}

TEST_CASE("rounding outcomes") {
    const auto r = rounding_outcomes(10, 0.5, 50.0, 50, 10000, 8, 2);
    std::size_t ok = 0;
    for (const auto& o : r) {
        ok += o.success;
        if (o.success) CHECK_NOTHROW(verify_rounding(o.certificate, 0.5));
    }
    CHECK(ok >= 49);
}

TEST_CASE("parameters") {
    ExperimentConfig c = default_config("theorem-b");
    CHECK(c.n == std::vector<std::size_t>{10, 12, 14});
    set_param(c, "n", "10,14");
    CHECK(c.n == std::vector<std::size_t>{10, 14});
    set_param(c, "trials", "1e6");
    CHECK(c.trials == 1000000);
    set_param(c, "p", "0.3");
    CHECK(c.p == make_rational(3, 10));
    CHECK_THROWS_AS(set_param(c, "bogus", "1"), InvalidArgument);
    CHECK_THROWS_AS(set_param(c, "delta", "abc"), InvalidArgument);
    CHECK_THROWS_AS(set_param(c, "trials", "-3"), InvalidArgument);
    CHECK_THROWS_AS(default_config("nope"), InvalidArgument);
    CHECK_THROWS_AS(validate(make("mc-singularity", {{"p", "3/2"}})), InvalidArgument);
    CHECK_THROWS_AS(validate(make("smin-tail", {{"s", "1/2"}})), InvalidArgument);
    CHECK_THROWS_AS(validate(make("normal-threshold", {{"n", "17"}})), InvalidArgument);
    CHECK_THROWS_AS(validate(make("enum-singularity", {{"n", "5"}})), BudgetExceeded);
    CHECK_THROWS_AS(validate(make("rounding-suite", {{"n", "26"}})), BudgetExceeded);
    CHECK_THROWS_AS(validate(make("theorem-b", {{"trials", "50"}})), InvalidArgument);
    CHECK_NOTHROW(validate(make("theorem-b", {{"trials", "50"}, {"pilot", "1"}})));
}

TEST_CASE("record format") {
    const auto res = run_experiment(make("theorem-b", {{"n", "8"}, {"trials", "100"}, {"grid", "0,2,4"}}));
    const Json j = to_json(res.record);
    for (const char* k : {"experiment", "params", "seed", "workers", "points", "pinned", "runtime_sec", "version"})
        CHECK(j.contains(k));
    REQUIRE(j["points"].size() == 3);
    for (const auto& p : j["points"]) {
        CHECK(p.size() == 5);
        CHECK(p["ci_low"].get<double>() <= p["estimate"].get<double>());
        CHECK(p["estimate"].get<double>() <= p["ci_high"].get<double>());
        CHECK(p["count"].get<std::uint64_t>() == 100);
    }
    CHECK(j["points"][0]["estimate"].get<double>() == 1.0);
    const std::string csv = to_csv(res.record);
    CHECK(csv.rfind("experiment,param_key,param_value,estimate,ci_low,ci_high,count\n", 0) == 0);
    CHECK(csv.find("theorem-b,n;N;L_B,8;") != std::string::npos);
}

TEST_CASE("points are identical for any worker count") {
    const std::vector<std::pair<std::string, std::vector<std::pair<const char*, const char*>>>> runs{
        {"enum-singularity", {{"n", "3"}}},
        {"mc-singularity", {{"n", "5"}, {"trials", "20000"}}},
        {"smin-tail", {{"n", "20"}, {"trials", "300"}}},
        {"normal-threshold", {{"n", "8"}, {"trials", "100"}}},
        {"theorem-b", {{"n", "8,10"}, {"trials", "200"}}},
        {"rounding-suite", {{"n", "8"}, {"trials", "40"}}},
    };
    for (const auto& [name, kv] : runs) {
        ExperimentConfig c = default_config(name);
        for (const auto& [k, v] : kv) set_param(c, k, v);
        c.workers = 1;
        const std::string a = points_json(run_experiment(c).record.points).dump();
        c.workers = 5;
        const std::string b = points_json(run_experiment(c).record.points).dump();
        CHECK_MESSAGE(a == b, name);
    }
}

TEST_CASE("pilot writes pinned constants and checks read them") {
    ExperimentConfig c = make("normal-threshold", {{"n", "8"}, {"trials", "30"}, {"pilot", "1"}, {"seed", "9"}});
    const ExperimentResult pilot = run_experiment(c);
    CHECK(pilot.record.params["trials"].get<std::uint64_t>() == 300);
    REQUIRE(pilot.record.pinned.contains("K"));
    const Json fixtures = merge_fixtures(Json{{"other", 1}}, pilot);
    CHECK(fixtures["other"] == 1);
    CHECK(fixtures["normal-threshold"]["K"] == pilot.record.pinned["K"]);

    c.pilot = false;
    const ExperimentResult run = run_experiment(c, fixtures);
    CHECK(run.record.pinned == pilot.record.pinned);
    for (const auto& line : check_experiment(c, run)) CHECK_MESSAGE(line.pass, (line.name + " " + line.detail));
    const ExperimentResult bare = run_experiment(c);
    bool missing_fails = false;
    for (const auto& line : check_experiment(c, bare)) missing_fails = missing_fails || !line.pass;
    CHECK(missing_fails);
}
