#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "common/rational.hpp"
#include "model/matrix.hpp"

namespace rbsing {

/// Unit normal to a family of n-1 integer columns in Z^n.
struct NormalVector {
    std::vector<double> coords;  // unit length, first nonzero coordinate positive
    double residual = 0.0;       // max |<coords, column>| over the input columns
};

/// Exact determinant by fraction-free (Bareiss) elimination.
/// Uses 128-bit arithmetic when the Hadamard bound guarantees no overflow,
/// otherwise GMP integers. The empty matrix has determinant 1.
BigInt det_exact(const IntMatrix& m);

/// Singularity test equivalent to det_exact(m) == 0.
bool is_singular_exact(const IntMatrix& m);

/// Rank over the rationals.
std::size_t rank_exact(const IntMatrix& m);

/// Normal direction to the span of `columns` (each of length n, n - 1 of them).
/// Computed from an exact rational nullspace basis and normalised in floating point.
/// Throws DegenerateNullspace{n - rank} when the columns have rank below n - 1.
NormalVector unit_normal(std::span<const std::vector<std::int64_t>> columns);

/// Unit normal to the first n - 1 columns of a square matrix.
NormalVector unit_normal_of_leading_columns(const IntMatrix& m);

/// Smallest singular value.
double smin(const RealMatrix& m);

/// Largest singular value (operator 2-norm).
double spectral_norm(const RealMatrix& m);

}  // namespace rbsing
