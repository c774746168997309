#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "model/rng.hpp"

namespace rbsing {

struct IncompParams {
    double delta = 0.1;
    double nu = 0.5;

    void validate() const;
};

struct SparseTail {
    std::vector<std::size_t> support;  // indices of the k largest magnitudes
    double tail = 0.0;                 // distance from x to the k-sparse vectors
};

/// Keeps the k largest |x_i| (lower index wins ties); returns what is kept and the norm of the rest.
SparseTail sparse_tail(std::span<const double> x, std::size_t k);

enum class Compressibility { Comp, Incomp };

/// Comp iff the distance to floor(delta n)-sparse vectors is at most nu (boundary included).
Compressibility classify_compressible(std::span<const double> x, const IncompParams& params);

/// Number of coordinates with |x_i| >= nu / sqrt(n).
std::size_t incomp_coordinate_count(std::span<const double> x, const IncompParams& params);

/// Indices (0-based) ordered by decreasing |x_i|, ties by increasing index.
std::vector<std::size_t> special_permutation(std::span<const double> x);

/// log of the number of nested chains [n] > I_0 > ... > I_j0 with |I_j| = floor(2^-j delta n),
/// where j0 is the largest integer with delta n >= 2^j0. Zero when delta n < 1.
double log_permutation_family_size(std::size_t n, double delta);

struct IntInterval {
    std::int64_t lo = 0;
    std::int64_t hi = -1;

    std::uint64_t size() const { return hi < lo ? 0 : static_cast<std::uint64_t>(hi - lo) + 1; }
    friend bool operator==(const IntInterval&, const IntInterval&) = default;
};

/// Finite subset of Z stored as at most two disjoint sorted intervals.
class CoordinateSet {
public:
    CoordinateSet() = default;
    static CoordinateSet interval(std::int64_t lo, std::int64_t hi);
    /// {-a, ..., a}
    static CoordinateSet symmetric(std::int64_t a);
    /// [-outer, -inner] u [inner, outer]; empty when inner > outer.
    static CoordinateSet annulus(std::int64_t inner, std::int64_t outer);
    /// [lo, hi] with the integers of [cut_lo, cut_hi] removed.
    static CoordinateSet interval_minus(std::int64_t lo, std::int64_t hi, std::int64_t cut_lo, std::int64_t cut_hi);

    std::span<const IntInterval> parts() const { return {parts_, count_}; }
    std::size_t part_count() const { return count_; }
    std::uint64_t cardinality() const;
    bool empty() const { return cardinality() == 0; }
    std::int64_t max() const;
    std::int64_t min() const;
    bool contains(std::int64_t v) const;
    bool symmetric_about_origin() const;
    bool meets(std::int64_t lo, std::int64_t hi) const;
    /// k-th smallest element, 0 <= k < cardinality.
    std::int64_t element(std::uint64_t k) const;
    std::int64_t sample(CounterRng& rng) const;

    friend bool operator==(const CoordinateSet& a, const CoordinateSet& b);

private:
    void push(IntInterval iv);

    IntInterval parts_[2];
    std::size_t count_ = 0;
};

struct AdmissibleSet {
    std::vector<CoordinateSet> sets;
    std::int64_t N = 0;
    double K = 0.0;
    double delta = 0.0;

    std::size_t n() const { return sets.size(); }
    /// sum_i log |A_i|
    double log_volume() const;
    /// Smallest K with prod |A_i| <= (K N)^n.
    double minimal_K() const;
};

/// Theorem-B style product: the first floor(delta n) factors are +-{N+1..2N}, the rest {-N..N}.
AdmissibleSet theorem_b_domain(std::size_t n, double delta, std::int64_t N);

/// Lattice domain for incompressible normals with threshold about T; N = floor(nu / T) - 1.
/// Requires n >= 2, delta in [1/n, 1/2], nu in (0, 1], T in (0, 1] and nu / T >= 2.
AdmissibleSet normal_vector_domain(std::size_t n, double delta, double nu, double T);

struct AdmissibilityReport {
    bool pass = true;
    std::vector<std::string> violated;
};

/// Checks the five admissibility clauses:
///   "product-symmetric", "wide-interval", "two-interval-gap", "volume", "max-element".
AdmissibilityReport check_admissible(const AdmissibleSet& a, std::int64_t N, std::size_t n, double K, double delta);

}  // namespace rbsing
