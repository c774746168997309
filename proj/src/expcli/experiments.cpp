#include "expcli/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "averaging/averaging.hpp"
#include "common/errors.hpp"
#include "common/parallel.hpp"
#include "common/stats.hpp"
#include "concentration/concentration.hpp"
#include "exactlinalg/exactlinalg.hpp"
#include "geometry/geometry.hpp"
#include "model/model.hpp"

namespace rbsing {

namespace {

constexpr std::uint64_t kTagMc = 0x6d63;
constexpr std::uint64_t kTagSmin = 0x736d;
constexpr std::uint64_t kTagNormal = 0x6e74;
constexpr std::uint64_t kTagTheoremB = 0x7462;
constexpr std::uint64_t kTagRounding = 0x7273;
constexpr std::size_t kChunk = 1024;
constexpr std::size_t kMaxEnumDim = 4;

bool is(const ExperimentConfig& c, std::string_view name) { return c.name == name; }

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    // Accept 1e6 style counts as well as plain integers.
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec == std::errc() && ptr == v.data() + v.size()) return out;
    const double d = std::stod(std::string(v));
    if (!(d >= 0) || d != std::floor(d) || d > 1.8e19)
        throw InvalidArgument("parameter " + std::string(key) + ": expected a non-negative integer");
    return static_cast<std::uint64_t>(d);
}

double parse_double(std::string_view key, std::string_view v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(std::string(v), &used);
        if (used != v.size() || !std::isfinite(d)) throw InvalidArgument("");
        return d;
    } catch (const std::exception&) {
        throw InvalidArgument("parameter " + std::string(key) + ": expected a number, got '" + std::string(v) + "'");
    }
}

template <typename T, typename F>
std::vector<T> parse_list(std::string_view v, F&& one) {
    std::vector<T> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        const std::size_t comma = v.find(',', start);
        const std::string_view item = v.substr(start, comma == std::string_view::npos ? v.npos : comma - start);
        if (!item.empty()) out.push_back(one(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

Point proportion(Json x, std::uint64_t hits, std::uint64_t trials) {
    const Interval ci = wilson_interval(hits, trials);
    const double est = trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
    return {std::move(x), est, ci.low, ci.high, trials};
}

// Sample quantile (lower order statistic) with a distribution-free 95% rank interval.
Point quantile_point(Json x, std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    const auto at = [&](double r) {
        const double c = std::clamp(r, 0.0, static_cast<double>(m - 1));
        return values[static_cast<std::size_t>(c)];
    };
    const double center = std::ceil(q * static_cast<double>(m)) - 1.0;
    const double half = kZ95 * std::sqrt(static_cast<double>(m) * q * (1.0 - q));
    return {std::move(x), at(center), at(std::floor(center - half)), at(std::ceil(center + half)), m};
}

std::string rational_text(const Rational& q) { return to_string(q); }

Json params_json(const ExperimentConfig& c) {
    Json j = Json::object();
    if (is(c, "theorem-b"))
        j["n"] = c.n;
    else
        j["n"] = c.dim();
    j["p"] = rational_text(c.p);
    if (is(c, "mc-singularity") || is(c, "smin-tail") || is(c, "normal-threshold")) j["s"] = rational_text(c.s);
    if (is(c, "enum-singularity") || is(c, "mc-singularity")) j["model"] = c.model;
    if (is(c, "normal-threshold")) {
        j["L"] = c.L;
        j["delta"] = c.delta;
        j["nu"] = c.nu;
    }
    if (is(c, "theorem-b")) {
        j["delta"] = c.delta;
        j["eps"] = c.eps;
    }
    if (is(c, "smin-tail") || is(c, "theorem-b")) j["grid"] = c.grid;
    if (is(c, "rounding-suite")) {
        j["budget"] = c.budget;
        j["bound"] = c.entry_bound;
    }
    if (!is(c, "enum-singularity")) j["trials"] = c.effective_trials();
    j["pilot"] = c.pilot;
    return j;
}

bool has_number(const Json& obj, const char* key) { return obj.is_object() && obj.contains(key) && obj[key].is_number(); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// -- experiment bodies --------------------------------------------------------

void run_enum(const ExperimentConfig& c, ExperimentResult& out) {
    const Rational P = enum_singularity(c.dim(), c.p, c.model == "sign", c.workers);
    out.artifacts.exact = rational_text(P);
    const double v = to_double(P);
    const std::uint64_t total = std::uint64_t{1} << (c.dim() * c.dim());
    out.record.points.push_back({Json{{"n", c.dim()}, {"exact", out.artifacts.exact}}, v, v, v, total});
}

void run_mc(const ExperimentConfig& c, ExperimentResult& out) {
    const CountEstimate e = mc_singularity(c.dim(), c.p, c.s, c.model == "sign", c.effective_trials(), c.seed, c.workers);
    out.record.points.push_back(proportion(Json{{"n", c.dim()}, {"s", rational_text(c.s)}}, e.hits, e.trials));
}

void run_smin(const ExperimentConfig& c, ExperimentResult& out) {
    const std::uint64_t trials = c.effective_trials();
    const auto sm = smin_samples(c.dim(), c.p, c.s, trials, c.seed, c.workers);
    const double rn = std::sqrt(static_cast<double>(c.dim()));
    for (double t : c.grid) {
        const auto hits = static_cast<std::uint64_t>(std::count_if(sm.begin(), sm.end(), [&](double v) { return v <= t / rn; }));
        out.record.points.push_back(proportion(Json{{"t", t}}, hits, trials));
    }
    if (c.pilot) {
        double lo = INFINITY, hi = 0.0;
        for (const Point& pt : out.record.points) {
            const double t = pt.x["t"].get<double>();
            if (t > 0.5) continue;
            lo = std::min(lo, pt.estimate / t);
            hi = std::max(hi, pt.estimate / t);
        }
        if (hi > 0)
            out.record.pinned = Json{{"band_low", lo / 2.0}, {"band_high", 2.0 * hi}, {"pilot_trials", trials},
                                     {"pilot_seed", c.seed}};
    }
}

void run_normal(const ExperimentConfig& c, ExperimentResult& out) {
    const std::uint64_t trials = c.effective_trials();
    const auto samples =
        normal_threshold_samples(c.dim(), c.p, c.s, c.L, c.delta, c.nu, trials, c.seed, c.workers);
    const double rn = std::sqrt(static_cast<double>(c.dim()));
    const double floor_value = std::min(1.0, std::pow(1.0 - to_double(c.p), static_cast<double>(c.dim())) / c.L);
    std::vector<double> comp, incomp;
    double min_ratio = INFINITY;
    auto& a = out.artifacts;
    for (const auto& s : samples) {
        a.rank_deficient += s.rank_deficient;
        if (s.degenerate) {
            ++a.degenerate;
            continue;
        }
        (s.incomp ? incomp : comp).push_back(s.T * rn);
        min_ratio = std::min(min_ratio, s.T / floor_value);
    }
    a.min_threshold_ratio = min_ratio;
    const std::uint64_t good = trials - a.degenerate;
    auto& pts = out.record.points;
    pts.push_back(proportion(Json{{"stat", "degenerate_fraction"}}, a.degenerate, trials));
    pts.push_back(proportion(Json{{"stat", "incomp_fraction"}}, incomp.size(), good));
    if (good > 0) pts.push_back({Json{{"stat", "min_T_over_floor"}}, min_ratio, min_ratio, min_ratio, good});
    for (const auto& [label, vals] : {std::pair<const char*, const std::vector<double>*>{"Comp", &comp}, {"Incomp", &incomp}}) {
        if (vals->empty()) continue;
        for (double q : {0.1, 0.5, 0.9})
            pts.push_back(quantile_point(Json{{"stat", "T_sqrt_n_quantile"}, {"class", label}, {"q", q}}, *vals, q));
    }
    if (c.pilot && !incomp.empty()) {
        const double med = quantile_point(Json(), incomp, 0.5).estimate;
        out.record.pinned = Json{{"K", 1.25 * med}, {"pilot_median", med}, {"pilot_trials", trials}, {"pilot_seed", c.seed}};
    }
}

struct SweepCurve {
    std::size_t n;
    std::int64_t N;
    std::vector<ExceedancePoint> curve;
};

std::vector<double> theoremB_grid(const ExperimentConfig& c, const Json& pinned) {
    std::vector<double> g = c.grid;
    if (has_number(pinned, "L_B_star")) g.push_back(pinned["L_B_star"].get<double>());
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

void run_theoremB(const ExperimentConfig& c, const Json& pinned, ExperimentResult& out) {
    const std::uint64_t trials = c.effective_trials();
    const auto grid = theoremB_grid(c, pinned);
    std::vector<SweepCurve> curves;
    for (std::size_t n : c.n) {
        TheoremBConfig cfg;
        cfg.n = n;
        cfg.delta = c.delta;
        cfg.p = c.p;
        cfg.eps = c.eps;
        cfg.N = theoremB_range_cap(n, c.p, c.eps);
        const auto est = theoremB_estimate(cfg, trials, grid, c.seed, derive_stream(kTagTheoremB, n), c.workers);
        curves.push_back({n, cfg.N, est.curve});
        for (const auto& e : est.curve)
            out.record.points.push_back({Json{{"n", n}, {"N", cfg.N}, {"L_B", e.L_B}}, e.fraction, e.ci_low, e.ci_high, trials});
    }
    if (!c.pilot || curves.size() < 2) return;
    // L_B* maximizes the z-score of (smallest n minus largest n) at the normal trial budget, among grid
    // points where the pilot estimates do not increase in n.
    const auto sigma2 = [&](double f) { return std::max(f * (1.0 - f), 0.25 / static_cast<double>(c.trials)) / static_cast<double>(c.trials); };
    double best_z = 0.0;
    std::size_t best = grid.size();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        bool nonincreasing = true;
        for (std::size_t i = 1; i < curves.size(); ++i)
            nonincreasing = nonincreasing && curves[i].curve[g].fraction <= curves[i - 1].curve[g].fraction;
        const double f0 = curves.front().curve[g].fraction, f1 = curves.back().curve[g].fraction;
        const double z = (f0 - f1) / std::sqrt(sigma2(f0) + sigma2(f1));
        if (nonincreasing && z > best_z) {
            best_z = z;
            best = g;
        }
    }
    if (best == grid.size()) return;
    const double f = curves.back().curve[best].fraction;
    out.record.pinned = Json{{"L_B_star", grid[best]},
                             {"n", curves.back().n},
                             {"bound", f + 4.0 * std::sqrt(sigma2(f))},
                             {"pilot_fraction", f},
                             {"pilot_z", best_z},
                             {"pilot_trials", trials},
                             {"pilot_seed", c.seed}};
}

void run_rounding(const ExperimentConfig& c, ExperimentResult& out) {
    const std::uint64_t count = c.effective_trials();
    const auto res = rounding_outcomes(c.dim(), to_double(c.p), c.entry_bound, count, c.budget, c.seed, c.workers);
    std::vector<double> attempts;
    std::uint64_t ok = 0;
    for (const auto& r : res) {
        if (!r.success) continue;
        ++ok;
        attempts.push_back(static_cast<double>(r.attempts));
        out.artifacts.certificates.push_back(r.certificate);
    }
    auto& pts = out.record.points;
    pts.push_back(proportion(Json{{"stat", "success_rate"}}, ok, count));
    if (!attempts.empty()) {
        pts.push_back(quantile_point(Json{{"stat", "median_attempts"}}, attempts, 0.5));
        std::uint64_t lo = 1;
        while (lo <= c.budget) {
            const std::uint64_t hi = 2 * lo - 1;
            const auto in = static_cast<std::uint64_t>(std::count_if(attempts.begin(), attempts.end(), [&](double a) {
                return a >= static_cast<double>(lo) && a <= static_cast<double>(hi);
            }));
            if (in > 0) pts.push_back(proportion(Json{{"stat", "attempts_histogram"}, {"lo", lo}, {"hi", hi}}, in, ok));
            lo *= 2;
        }
    }
    if (c.pilot) {
        const double rate = static_cast<double>(ok) / static_cast<double>(count);
        out.record.pinned = Json{{"min_success_rate", 0.99},
                                 {"max_median_attempts", 16},
                                 {"pilot_success_rate", rate},
                                 {"pilot_median_attempts", attempts.empty() ? 0.0 : pts[1].estimate},
                                 {"pilot_trials", count},
                                 {"pilot_seed", c.seed}};
    }
}

// -- checks -------------------------------------------------------------------

const Point* find_point(const ExperimentRecord& r, const Json& x) {
    for (const auto& p : r.points)
        if (p.x == x) return &p;
    return nullptr;
}

const Point* find_stat(const ExperimentRecord& r, const char* stat) {
    for (const auto& p : r.points)
        if (p.x.is_object() && p.x.value("stat", "") == stat) return &p;
    return nullptr;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"enum-singularity", "mc-singularity", "smin-tail",
                                                "normal-threshold", "theorem-b",      "rounding-suite"};
    return names;
}

ExperimentConfig default_config(std::string_view name) {
    ExperimentConfig c;
    c.name = std::string(name);
    if (name == "enum-singularity") {
        c.n = {2};
    } else if (name == "mc-singularity") {
        c.n = {3};
        c.trials = 1000000;
    } else if (name == "smin-tail") {
        c.n = {100};
        c.s = make_rational(-1, 2);
        c.grid = {0.05, 0.1, 0.2, 0.5};
        c.trials = 2000;
    } else if (name == "normal-threshold") {
        c.n = {16};
        c.s = make_rational(-1, 2);
        c.L = 20.0;
        c.trials = 200;
    } else if (name == "theorem-b") {
        c.n = {10, 12, 14};
        c.grid = {0, 1, 2, 2.5, 3, 3.5, 4, 4.5, 5, 6, 8, 16, 32, 64};
        c.trials = 2000;
    } else if (name == "rounding-suite") {
        c.n = {12};
        c.trials = 300;
    } else {
        throw InvalidArgument("unknown experiment '" + std::string(name) + "'");
    }
    return c;
}

void set_param(ExperimentConfig& c, std::string_view key, std::string_view value) {
    if (key == "n") {
        c.n = parse_list<std::size_t>(value, [&](std::string_view v) { return static_cast<std::size_t>(parse_u64(key, v)); });
        if (c.n.empty()) throw InvalidArgument("parameter n: empty list");
    } else if (key == "p") {
        c.p = parse_rational(value);
    } else if (key == "s") {
        c.s = parse_rational(value);
    } else if (key == "delta") {
        c.delta = parse_double(key, value);
    } else if (key == "nu") {
        c.nu = parse_double(key, value);
    } else if (key == "eps") {
        c.eps = parse_double(key, value);
    } else if (key == "L") {
        c.L = parse_double(key, value);
    } else if (key == "trials") {
        c.trials = parse_u64(key, value);
    } else if (key == "seed") {
        c.seed = parse_u64(key, value);
    } else if (key == "workers") {
        c.workers = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "pilot") {
        c.pilot = value == "1" || value == "true";
    } else if (key == "model") {
        c.model = std::string(value);
    } else if (key == "grid") {
        c.grid = parse_list<double>(value, [&](std::string_view v) { return parse_double(key, v); });
    } else if (key == "budget") {
        c.budget = parse_u64(key, value);
    } else if (key == "bound") {
        c.entry_bound = parse_double(key, value);
    } else {
        throw InvalidArgument("unknown parameter '" + std::string(key) + "'");
    }
}

void validate(const ExperimentConfig& c) {
    default_config(c.name);  // name check
    require(!c.n.empty() && c.dim() >= 1, "n must be at least 1");
    require(c.p >= 0 && c.p <= 1, "p must lie in [0, 1]");
    require(c.model == "bernoulli" || c.model == "sign", "model must be bernoulli or sign");
    require(c.workers >= 1 && c.workers <= 256, "workers must lie in [1, 256]");
    if (!is(c, "enum-singularity")) require(c.trials >= 1, "trials must be at least 1");
    if (!is(c, "theorem-b")) require(c.n.size() == 1, "only theorem-b accepts a list of n");
    if (is(c, "enum-singularity") && c.dim() > kMaxEnumDim)
        throw BudgetExceeded("enum-singularity: 2^(n^2) matrices exceed the enumeration budget", c.dim(), kMaxEnumDim);
    if (is(c, "mc-singularity")) require(c.model == "bernoulli" || c.s == 0, "the sign model takes no shift");
    if (is(c, "smin-tail") || is(c, "normal-threshold")) require(c.s >= -1 && c.s <= 0, "s must lie in [-1, 0]");
    if (is(c, "smin-tail")) {
        require(!c.grid.empty(), "smin-tail needs a t grid");
        for (double t : c.grid) require(t >= 0, "t grid values must be non-negative");
    }
    if (is(c, "normal-threshold")) {
        require(c.dim() >= 2 && c.dim() <= 16, "normal-threshold needs 2 <= n <= 16");
        require(c.p > 0 && c.p < 1, "normal-threshold needs p in (0, 1)");
        require(c.L > 0, "L must be positive");
        IncompParams{c.delta, c.nu}.validate();
    }
    if (is(c, "theorem-b")) {
        require(c.p > 0 && c.p < 1, "theorem-b needs p in (0, 1)");
        require(c.effective_trials() >= 100, "theorem-b needs at least 100 trials");
        require(c.delta > 0 && c.delta <= 1, "delta must lie in (0, 1]");
        require(c.eps > 0 && c.eps < to_double(c.p), "eps must lie in (0, p)");
        require(std::is_sorted(c.n.begin(), c.n.end()), "theorem-b: n list must be increasing");
        for (double g : c.grid) require(g >= 0, "L_B grid values must be non-negative");
    }
    if (is(c, "rounding-suite")) {
        require(c.p > 0 && c.p < 1, "rounding-suite needs p in (0, 1)");
        require(c.budget >= 1, "budget must be positive");
        require(c.entry_bound > 0, "bound must be positive");
        if (c.dim() > kMaxRoundingDimension)
            throw BudgetExceeded("rounding-suite: exact certificates need n <= 25", c.dim(), kMaxRoundingDimension);
    }
}

Json points_json(const std::vector<Point>& points) {
    Json arr = Json::array();
    for (const auto& p : points)
        arr.push_back(Json{{"x", p.x}, {"estimate", p.estimate}, {"ci_low", p.ci_low}, {"ci_high", p.ci_high}, {"count", p.count}});
    return arr;
}

Json to_json(const ExperimentRecord& r) {
    return Json{{"experiment", r.experiment}, {"params", r.params},       {"seed", r.seed},
                {"workers", r.workers},       {"points", points_json(r.points)}, {"pinned", r.pinned},
                {"runtime_sec", r.runtime_sec}, {"version", r.version}};
}

std::string to_csv(const ExperimentRecord& r) {
    std::ostringstream os;
    os << "experiment,param_key,param_value,estimate,ci_low,ci_high,count\n";
    const auto scalar = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    for (const auto& p : r.points) {
        std::string keys, vals;
        if (p.x.is_object()) {
            for (auto it = p.x.begin(); it != p.x.end(); ++it) {
                if (!keys.empty()) {
                    keys += ';';
                    vals += ';';
                }
                keys += it.key();
                vals += scalar(it.value());
            }
        } else {
            keys = "x";
            vals = scalar(p.x);
        }
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%llu", p.estimate, p.ci_low, p.ci_high,
                      static_cast<unsigned long long>(p.count));
        os << r.experiment << ',' << keys << ',' << vals << ',' << buf << '\n';
    }
    return os.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Json& fixtures) {
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentResult out;
    auto& r = out.record;
    r.experiment = cfg.name;
    r.params = params_json(cfg);
    r.seed = cfg.seed;
    r.workers = cfg.workers;
    const Json pinned = fixtures.is_object() && fixtures.contains(cfg.name) ? fixtures[cfg.name] : Json::object();
    r.pinned = pinned;
    if (cfg.pilot) r.pinned = Json::object();

    if (is(cfg, "enum-singularity"))
        run_enum(cfg, out);
    else if (is(cfg, "mc-singularity"))
        run_mc(cfg, out);
    else if (is(cfg, "smin-tail"))
        run_smin(cfg, out);
    else if (is(cfg, "normal-threshold"))
        run_normal(cfg, out);
    else if (is(cfg, "theorem-b"))
        run_theoremB(cfg, pinned, out);
    else
        run_rounding(cfg, out);

    r.runtime_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

Json merge_fixtures(const Json& fixtures, const ExperimentResult& result) {
    Json out = fixtures.is_object() ? fixtures : Json::object();
    if (!result.record.pinned.empty()) out[result.record.experiment] = result.record.pinned;
    return out;
}

std::vector<CheckLine> check_experiment(const ExperimentConfig& c, const ExperimentResult& res) {
    std::vector<CheckLine> lines;
    const auto& r = res.record;
    const Json& pin = r.pinned;
    const auto add = [&](std::string name, bool pass, std::string detail) {
        lines.push_back({std::move(name), pass, std::move(detail)});
    };

    if (is(c, "enum-singularity")) {
        // Independent path: rank deficiency instead of a zero determinant.
        const std::size_t n = c.dim();
        const std::uint64_t total = std::uint64_t{1} << (n * n);
        Rational P = 0;
        const Rational q = 1 - c.p;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            IntMatrix m(n, n);
            int ones = 0;
            for (std::size_t i = 0; i < n * n; ++i) {
                const bool bit = (mask >> i) & 1U;
                ones += bit;
                m(i / n, i % n) = c.model == "sign" ? (bit ? 1 : -1) : (bit ? 1 : 0);
            }
            if (rank_exact(m) == n) continue;
            if (c.model == "sign") {
                P += 1;
            } else {
                Rational w = 1;
                for (int k = 0; k < ones; ++k) w *= c.p;
                for (std::size_t k = static_cast<std::size_t>(ones); k < n * n; ++k) w *= q;
                P += w;
            }
        }
        if (c.model == "sign") P /= Rational(BigInt(1) << static_cast<mp_bitcnt_t>(n * n));
        P.canonicalize();
        add("rank oracle agrees", to_string(P) == res.artifacts.exact, res.artifacts.exact + " vs " + to_string(P));
    } else if (is(c, "mc-singularity")) {
        const Point& pt = r.points.front();
        if (c.p == 0 && c.model == "bernoulli") {
            add("p = 0 gives estimate 1", pt.estimate == 1.0, fmt(pt.estimate));
        } else if (c.s == 0 && c.dim() <= 3) {
            const double exact = to_double(enum_singularity(c.dim(), c.p, c.model == "sign", c.workers));
            const double sigma = binomial_sigma(exact, pt.count);
            add("within 4 sigma of exact enumeration", std::fabs(pt.estimate - exact) <= 4.0 * sigma,
                "estimate " + fmt(pt.estimate) + ", exact " + fmt(exact) + ", sigma " + fmt(sigma));
        } else {
            add("estimate in [0, 1]", pt.estimate >= 0 && pt.estimate <= 1, fmt(pt.estimate));
        }
    } else if (is(c, "smin-tail")) {
        bool mono = true;
        std::vector<const Point*> sorted;
        for (const auto& p : r.points) sorted.push_back(&p);
        std::sort(sorted.begin(), sorted.end(), [](const Point* a, const Point* b) { return a->x["t"].get<double>() < b->x["t"].get<double>(); });
        for (std::size_t i = 1; i < sorted.size(); ++i) mono = mono && sorted[i]->estimate >= sorted[i - 1]->estimate;
        add("tail nondecreasing in t", mono, "");
        if (has_number(pin, "band_low") && has_number(pin, "band_high")) {
            const double lo = pin["band_low"], hi = pin["band_high"];
            bool in = true;
            std::string d;
            for (auto* p : sorted) {
                const double t = p->x["t"].get<double>();
                if (t > 0.5 || t <= 0) continue;
                const double ratio = p->estimate / t;
                in = in && ratio >= lo && ratio <= hi;
                d += "t=" + fmt(t) + ":" + fmt(ratio) + " ";
            }
            add("P(t)/t within pinned band", in, d + "band [" + fmt(lo) + ", " + fmt(hi) + "]");
        } else {
            add("P(t)/t within pinned band", false, "no pinned band");
        }
    } else if (is(c, "normal-threshold")) {
        const auto& a = res.artifacts;
        add("every T >= (1-p)^n / L", a.min_threshold_ratio >= 1.0 - 1e-12, "min ratio " + fmt(a.min_threshold_ratio));
        add("degenerate draws = rank-deficient draws", a.degenerate == a.rank_deficient,
            std::to_string(a.degenerate) + " vs " + std::to_string(a.rank_deficient));
        const Point* med = find_point(r, Json{{"stat", "T_sqrt_n_quantile"}, {"class", "Incomp"}, {"q", 0.5}});
        if (!med)
            add("Incomp median T sqrt(n) <= K", false, "no incompressible draws");
        else if (!has_number(pin, "K"))
            add("Incomp median T sqrt(n) <= K", false, "no pinned K");
        else
            add("Incomp median T sqrt(n) <= K", med->estimate <= pin["K"].get<double>(),
                fmt(med->estimate) + " vs K = " + fmt(pin["K"].get<double>()));
    } else if (is(c, "theorem-b")) {
        std::map<std::size_t, std::vector<const Point*>> by_n;
        for (const auto& p : r.points) by_n[p.x["n"].get<std::size_t>()].push_back(&p);
        for (auto& [n, pts] : by_n) {
            bool mono = true;
            for (std::size_t i = 1; i < pts.size(); ++i) mono = mono && pts[i]->estimate <= pts[i - 1]->estimate;
            add("n=" + std::to_string(n) + ": exceedance nonincreasing in L_B", mono, "");
            for (auto* p : pts)
                if (p->x["L_B"].get<double>() == 0.0)
                    add("n=" + std::to_string(n) + ": fraction at L_B=0 is 1", p->estimate == 1.0, fmt(p->estimate));
        }
        if (!has_number(pin, "L_B_star") || !has_number(pin, "bound")) {
            add("exceedance at L_B* below pinned bound", false, "no pinned L_B*");
        } else {
            const double star = pin["L_B_star"];
            std::vector<const Point*> at;
            for (auto& [n, pts] : by_n)
                for (auto* p : pts)
                    if (p->x["L_B"].get<double>() == star) at.push_back(p);
            const std::size_t pin_n = pin.value("n", std::size_t{0});
            bool found = false;
            for (auto* p : at)
                if (p->x["n"].get<std::size_t>() == pin_n) {
                    found = true;
                    add("n=" + std::to_string(pin_n) + ": exceedance at L_B*=" + fmt(star) + " below pinned bound",
                        p->estimate <= pin["bound"].get<double>(),
                        fmt(p->estimate) + " vs " + fmt(pin["bound"].get<double>()));
                }
            if (!found) add("exceedance at L_B* below pinned bound", false, "pinned n not in sweep");
            if (at.size() >= 2) {
                // Neighbouring n: no increase beyond sampling noise. Extremes: a strict decrease beyond CIs.
                for (std::size_t i = 1; i < at.size(); ++i)
                    add("L_B*: no significant increase from n=" + std::to_string(at[i - 1]->x["n"].get<std::size_t>()) +
                            " to n=" + std::to_string(at[i]->x["n"].get<std::size_t>()),
                        at[i]->ci_low <= at[i - 1]->ci_high, fmt(at[i - 1]->estimate) + " -> " + fmt(at[i]->estimate));
                add("L_B*: largest n below smallest n beyond CIs", at.back()->ci_high < at.front()->ci_low,
                    "[" + fmt(at.back()->ci_low) + ", " + fmt(at.back()->ci_high) + "] vs [" + fmt(at.front()->ci_low) +
                        ", " + fmt(at.front()->ci_high) + "]");
            }
        }
    } else if (is(c, "rounding-suite")) {
        const double min_rate = pin.value("min_success_rate", 0.99);
        const double max_med = pin.value("max_median_attempts", 16.0);
        const Point* rate = find_stat(r, "success_rate");
        const Point* med = find_stat(r, "median_attempts");
        add("success rate >= " + fmt(min_rate), rate && rate->estimate >= min_rate, rate ? fmt(rate->estimate) : "");
        add("median attempts <= " + fmt(max_med), med && med->estimate <= max_med, med ? fmt(med->estimate) : "none");
        std::size_t bad = 0;
        for (const auto& cert : res.artifacts.certificates) {
            try {
                verify_rounding(cert, to_double(c.p));
            } catch (const CertificateInvalid&) {
                ++bad;
            }
        }
        add("every archived certificate re-verifies", bad == 0,
            std::to_string(res.artifacts.certificates.size() - bad) + "/" + std::to_string(res.artifacts.certificates.size()));
    }
    return lines;
}

// -- experiment kernels -------------------------------------------------------

Rational enum_singularity(std::size_t n, const Rational& p, bool sign_model, unsigned workers) {
    require(n >= 1, "enum_singularity: n must be at least 1");
    require(p >= 0 && p <= 1, "enum_singularity: p must lie in [0, 1]");
    if (n > kMaxEnumDim) throw BudgetExceeded("enum_singularity: 2^(n^2) exceeds the enumeration budget", n, kMaxEnumDim);
    const std::size_t cells = n * n;
    const std::uint64_t total = std::uint64_t{1} << cells;
    const std::size_t chunks = static_cast<std::size_t>((total + kChunk - 1) / kChunk);
    // Singular counts by number of ones, per chunk.
    std::vector<std::vector<std::uint64_t>> counts(chunks, std::vector<std::uint64_t>(cells + 1, 0));
    parallel_for(chunks, workers, [&](std::size_t ch) {
        IntMatrix m(n, n);
        const std::uint64_t hi = std::min<std::uint64_t>(total, (ch + 1) * kChunk);
        for (std::uint64_t mask = ch * kChunk; mask < hi; ++mask) {
            for (std::size_t i = 0; i < cells; ++i) {
                const bool bit = (mask >> i) & 1U;
                m(i / n, i % n) = sign_model ? (bit ? 1 : -1) : (bit ? 1 : 0);
            }
            if (is_singular_exact(m)) ++counts[ch][static_cast<std::size_t>(__builtin_popcountll(mask))];
        }
    });
    std::vector<std::uint64_t> by_ones(cells + 1, 0);
    for (const auto& c : counts)
        for (std::size_t k = 0; k <= cells; ++k) by_ones[k] += c[k];
    Rational P = 0;
    if (sign_model) {
        std::uint64_t s = 0;
        for (auto v : by_ones) s += v;
        P = Rational(BigInt(static_cast<unsigned long>(s)), BigInt(1) << static_cast<mp_bitcnt_t>(cells));
    } else {
        const Rational q = 1 - p;
        for (std::size_t k = 0; k <= cells; ++k) {
            if (by_ones[k] == 0) continue;
            Rational w = 1;
            for (std::size_t i = 0; i < k; ++i) w *= p;
            for (std::size_t i = k; i < cells; ++i) w *= q;
            P += Rational(BigInt(static_cast<unsigned long>(by_ones[k]))) * w;
        }
    }
    P.canonicalize();
    return P;
}

CountEstimate mc_singularity(std::size_t n, const Rational& p, const Rational& s, bool sign_model, std::uint64_t trials,
                             std::uint64_t seed, unsigned workers) {
    require(n >= 1 && trials >= 1, "mc_singularity: need n >= 1 and trials >= 1");
    const ModelParams params{n, p, s};
    params.validate();
    const std::size_t chunks = static_cast<std::size_t>((trials + kChunk - 1) / kChunk);
    std::vector<std::uint64_t> hits(chunks, 0);
    parallel_for(chunks, workers, [&](std::size_t ch) {
        const std::uint64_t hi = std::min<std::uint64_t>(trials, (ch + 1) * kChunk);
        for (std::uint64_t k = ch * kChunk; k < hi; ++k) {
            const RngSeed rs{seed, derive_stream(kTagMc, k)};
            IntMatrix m = sign_model ? sample_sign_matrix(n, rs) : sample_bernoulli_matrix(n, p, rs);
            if (s != 0) m = scaled_shifted_matrix(m, s);
            hits[ch] += is_singular_exact(m);
        }
    });
    CountEstimate e{0, trials};
    for (auto h : hits) e.hits += h;
    return e;
}

std::vector<double> smin_samples(std::size_t n, const Rational& p, const Rational& s, std::uint64_t trials,
                                 std::uint64_t seed, unsigned workers) {
    const ModelParams params{n, p, s};
    params.validate();
    std::vector<double> out(trials, 0.0);
    parallel_for(trials, workers, [&](std::size_t k) {
        const IntMatrix b = sample_bernoulli_matrix(n, p, RngSeed{seed, derive_stream(kTagSmin, k)});
        out[k] = smin(shifted_matrix(b, s));
    });
    return out;
}

std::vector<NormalSample> normal_threshold_samples(std::size_t n, const Rational& p, const Rational& s, double L,
                                                   double delta, double nu, std::uint64_t trials, std::uint64_t seed,
                                                   unsigned workers) {
    const ModelParams params{n, p, s};
    params.validate();
    const IncompParams ip{delta, nu};
    std::vector<NormalSample> out(trials);
    parallel_for(trials, workers, [&](std::size_t k) {
        const IntMatrix b = sample_bernoulli_matrix(n, p, RngSeed{seed, derive_stream(kTagNormal, k)});
        const IntMatrix m = scaled_shifted_matrix(b, s);
        IntMatrix lead(n, n - 1);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j + 1 < n; ++j) lead(i, j) = m(i, j);
        NormalSample& o = out[k];
        o.rank_deficient = rank_exact(lead) < n - 1;
        try {
            const NormalVector y = unit_normal_of_leading_columns(m);
            o.incomp = classify_compressible(y.coords, ip) == Compressibility::Incomp;
            o.T = threshold(y.coords, ThresholdQuery{L, p}).T;
        } catch (const DegenerateNullspace&) {
            o.degenerate = true;
        }
    });
    return out;
}

std::vector<RoundingOutcome> rounding_outcomes(std::size_t n, double p, double bound, std::uint64_t count,
                                               std::uint64_t budget, std::uint64_t seed, unsigned workers) {
    std::vector<RoundingOutcome> out(count);
    const double rn = std::sqrt(static_cast<double>(n));
    parallel_for(count, workers, [&](std::size_t k) {
        CounterRng gen(RngSeed{seed, derive_stream(kTagRounding, 2 * k)});
        std::vector<double> y(n);
        double sum = 0.0;
        for (auto& v : y) {
            v = bound * (2.0 * gen.next_unit() - 1.0);
            sum += v;
        }
        const double lambda = p * sum;
        // Smallest L the hypothesis admits, so every input satisfies it.
        const double L = small_ball_slope(subset_sum_law(y, p), lambda, rn).slope;
        RoundingOutcome& o = out[k];
        try {
            o.certificate = randomized_round(y, lambda, p, L, {}, budget, RngSeed{seed, derive_stream(kTagRounding, 2 * k + 1)});
            o.success = true;
            o.attempts = o.certificate.attempts;
        } catch (const BudgetExhausted& e) {
            o.attempts = e.attempts();
        }
    });
    return out;
}

}  // namespace rbsing
