#include "geometry/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "common/errors.hpp"

namespace rbsing {

namespace {

// floor(delta * n), tolerant of representation error in delta.
std::size_t heavy_count(std::size_t n, double delta) {
    return static_cast<std::size_t>(std::floor(delta * static_cast<double>(n) + 1e-9));
}

double log_binomial(double n, double k) {
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

void require_unit(std::span<const double> x) {
    double sq = 0.0;
    for (double v : x) sq += v * v;
    require(std::fabs(std::sqrt(sq) - 1.0) <= 1e-10, "expected a unit vector");
}

std::int64_t ceil_to_int(double v) {
    require(std::isfinite(v) && v < 9e18, "domain bound out of range");
    return static_cast<std::int64_t>(std::ceil(v));
}

}  // namespace

void IncompParams::validate() const {
    require(delta > 0 && delta <= 1, "delta must lie in (0, 1]");
    require(nu > 0 && nu <= 1, "nu must lie in (0, 1]");
}

SparseTail sparse_tail(std::span<const double> x, std::size_t k) {
    require(k <= x.size(), "sparse_tail: k must not exceed n");
    const auto order = special_permutation(x);
    SparseTail out;
    out.support.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    double sq = 0.0;
    // Smallest magnitudes first.
    for (std::size_t i = x.size(); i > k; --i) sq += x[order[i - 1]] * x[order[i - 1]];
    out.tail = std::sqrt(sq);
    return out;
}

Compressibility classify_compressible(std::span<const double> x, const IncompParams& params) {
    params.validate();
    require_unit(x);
    const auto tail = sparse_tail(x, heavy_count(x.size(), params.delta)).tail;
    return tail <= params.nu ? Compressibility::Comp : Compressibility::Incomp;
}

std::size_t incomp_coordinate_count(std::span<const double> x, const IncompParams& params) {
    params.validate();
    require_unit(x);
    const double cut = params.nu / std::sqrt(static_cast<double>(x.size()));
    return static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [&](double v) { return std::fabs(v) >= cut; }));
}

std::vector<std::size_t> special_permutation(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::fabs(x[a]) > std::fabs(x[b]); });
    return order;
}

double log_permutation_family_size(std::size_t n, double delta) {
    const double dn = delta * static_cast<double>(n);
    if (dn < 1.0) return 0.0;
    const auto j0 = static_cast<int>(std::floor(std::log2(dn) + 1e-12));
    double total = 0.0;
    double prev = static_cast<double>(n);
    for (int j = 0; j <= j0; ++j) {
        const double k = std::floor(std::ldexp(dn, -j) + 1e-9);
        total += log_binomial(prev, k);
        prev = k;
    }
    return total;
}

// CoordinateSet ---------------------------------------------------------------

void CoordinateSet::push(IntInterval iv) {
    if (iv.size() == 0) return;
    parts_[count_++] = iv;
}

CoordinateSet CoordinateSet::interval(std::int64_t lo, std::int64_t hi) {
    CoordinateSet s;
    s.push({lo, hi});
    return s;
}

CoordinateSet CoordinateSet::symmetric(std::int64_t a) {
    require(a >= 0, "CoordinateSet::symmetric: radius must be non-negative");
    return interval(-a, a);
}

CoordinateSet CoordinateSet::annulus(std::int64_t inner, std::int64_t outer) {
    require(inner >= 1, "CoordinateSet::annulus: inner radius must be positive");
    CoordinateSet s;
    if (inner > outer) return s;
    s.push({-outer, -inner});
    s.push({inner, outer});
    return s;
}

CoordinateSet CoordinateSet::interval_minus(std::int64_t lo, std::int64_t hi, std::int64_t cut_lo, std::int64_t cut_hi) {
    CoordinateSet s;
    if (cut_hi < cut_lo) {
        s.push({lo, hi});
        return s;
    }
    s.push({lo, std::min(hi, cut_lo - 1)});
    s.push({std::max(lo, cut_hi + 1), hi});
    return s;
}

std::uint64_t CoordinateSet::cardinality() const {
    std::uint64_t c = 0;
    for (const auto& p : parts()) c += p.size();
    return c;
}

std::int64_t CoordinateSet::max() const {
    require(count_ > 0, "CoordinateSet::max: empty set");
    return parts_[count_ - 1].hi;
}

std::int64_t CoordinateSet::min() const {
    require(count_ > 0, "CoordinateSet::min: empty set");
    return parts_[0].lo;
}

bool CoordinateSet::contains(std::int64_t v) const {
    for (const auto& p : parts())
        if (v >= p.lo && v <= p.hi) return true;
    return false;
}

bool CoordinateSet::symmetric_about_origin() const {
    if (count_ == 0) return true;
    if (count_ == 1) return parts_[0].lo == -parts_[0].hi;
    return parts_[0].lo == -parts_[1].hi && parts_[0].hi == -parts_[1].lo;
}

bool CoordinateSet::meets(std::int64_t lo, std::int64_t hi) const {
    for (const auto& p : parts())
        if (std::max(lo, p.lo) <= std::min(hi, p.hi)) return true;
    return false;
}

std::int64_t CoordinateSet::element(std::uint64_t k) const {
    for (const auto& p : parts()) {
        if (k < p.size()) return p.lo + static_cast<std::int64_t>(k);
        k -= p.size();
    }
    throw InvalidArgument("CoordinateSet::element: index out of range");
}

std::int64_t CoordinateSet::sample(CounterRng& rng) const {
    require(count_ > 0, "CoordinateSet::sample: empty set");
    return element(rng.next_below(cardinality()));
}

bool operator==(const CoordinateSet& a, const CoordinateSet& b) {
    return std::equal(a.parts().begin(), a.parts().end(), b.parts().begin(), b.parts().end());
}

// Admissible sets ------------------------------------------------------------

double AdmissibleSet::log_volume() const {
    double total = 0.0;
    for (const auto& s : sets) {
        const auto c = s.cardinality();
        total += c == 0 ? -std::numeric_limits<double>::infinity() : std::log(static_cast<double>(c));
    }
    return total;
}

double AdmissibleSet::minimal_K() const {
    require(N >= 1 && !sets.empty(), "minimal_K: need N >= 1 and n >= 1");
    const double k = std::exp(log_volume() / static_cast<double>(n())) / static_cast<double>(N);
    return std::max(1.0, k);
}

AdmissibleSet theorem_b_domain(std::size_t n, double delta, std::int64_t N) {
    require(n >= 1, "theorem_b_domain: n must be positive");
    require(delta > 0 && delta <= 1, "theorem_b_domain: delta must lie in (0, 1]");
    require(N >= 1, "theorem_b_domain: N must be positive");
    AdmissibleSet a;
    a.N = N;
    a.delta = delta;
    const std::size_t heavy = heavy_count(n, delta);
    a.sets.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        a.sets.push_back(i < heavy ? CoordinateSet::annulus(N + 1, 2 * N) : CoordinateSet::symmetric(N));
    a.K = a.minimal_K();
    return a;
}

AdmissibleSet normal_vector_domain(std::size_t n, double delta, double nu, double T) {
    require(n >= 2, "normal_vector_domain: n must be at least 2");
    const double dn = delta * static_cast<double>(n);
    require(dn >= 1.0 - 1e-12 && delta <= 0.5, "normal_vector_domain: delta must lie in [1/n, 1/2]");
    require(nu > 0 && nu <= 1, "normal_vector_domain: nu must lie in (0, 1]");
    require(T > 0 && T <= 1, "normal_vector_domain: T must lie in (0, 1]");
    require(nu / T >= 2.0, "normal_vector_domain: need nu / T >= 2");

    const auto F = static_cast<std::int64_t>(std::floor(nu / T));
    const double sd = std::sqrt(delta);
    AdmissibleSet a;
    a.N = F - 1;
    a.delta = delta;
    a.sets.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const auto id = static_cast<double>(i);
        if (i == 1) {
            const std::int64_t b = ceil_to_int(2.0 * std::sqrt(static_cast<double>(n)) / T) + 1;
            a.sets.push_back(CoordinateSet::annulus(F, b));
        } else if (i <= heavy_count(n, delta)) {
            int j = 1;
            while (std::ldexp(dn, -j) >= id) ++j;
            const std::int64_t b = ceil_to_int(std::pow(2.0, (j + 3) / 2.0) / (sd * T)) + 1;
            a.sets.push_back(CoordinateSet::annulus(F, b));
        } else {
            const std::int64_t b = ceil_to_int(std::sqrt(8.0) / (sd * T)) + 1;
            a.sets.push_back(CoordinateSet::symmetric(b));
        }
    }
    a.K = a.minimal_K();
    return a;
}

AdmissibilityReport check_admissible(const AdmissibleSet& a, std::int64_t N, std::size_t n, double K, double delta) {
    AdmissibilityReport r;
    auto fail = [&](const char* clause) {
        if (std::find(r.violated.begin(), r.violated.end(), clause) == r.violated.end()) r.violated.emplace_back(clause);
        r.pass = false;
    };
    if (a.sets.size() != n) fail("product-symmetric");
    for (const auto& s : a.sets)
        if (!s.symmetric_about_origin()) fail("product-symmetric");

    const double dn = delta * static_cast<double>(n);
    for (std::size_t i = 1; i <= a.sets.size(); ++i) {
        const auto& s = a.sets[i - 1];
        if (static_cast<double>(i) > dn + 1e-9) {
            if (s.part_count() != 1 || s.cardinality() < static_cast<std::uint64_t>(2 * N + 1)) fail("wide-interval");
        } else {
            if (s.part_count() != 2 || s.cardinality() < static_cast<std::uint64_t>(2 * N) || s.meets(-N, N))
                fail("two-interval-gap");
        }
    }

    const double cap = static_cast<double>(n) * std::log(K * static_cast<double>(N));
    if (!(N >= 1 && K > 0) || a.log_volume() > cap + 1e-12 * std::max(1.0, std::fabs(cap))) fail("volume");

    const double max_allowed = static_cast<double>(n) * static_cast<double>(N);
    for (const auto& s : a.sets)
        if (s.empty() || static_cast<double>(s.max()) >= max_allowed) fail("max-element");
    return r;
}

}  // namespace rbsing
