#include "exactlinalg/exactlinalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "common/errors.hpp"

namespace rbsing {

namespace {

using i128 = __int128;

// log2 of the Hadamard bound prod_r max(1, ||row_r||); every minor is bounded by it.
// Returns a negative value when some row is identically zero.
double log2_hadamard_bound(const IntMatrix& m) {
    double total = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        long double sq = 0;
        for (auto v : m.row(r)) sq += static_cast<long double>(v) * static_cast<long double>(v);
        if (sq == 0) return -1.0;
        total += 0.5 * std::log2(static_cast<double>(sq));
    }
    return total;
}

template <typename T>
T bareiss_det(std::vector<T> a, std::size_t n) {
    if (n == 0) return T(1);
    int sign = 1;
    T prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k * n + k] == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && a[swap_row * n + k] == 0) ++swap_row;
            if (swap_row == n) return T(0);
            for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[swap_row * n + c]);
            sign = -sign;
        }
        const T pivot = a[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const T lead = a[i * n + k];
            for (std::size_t j = k + 1; j < n; ++j) {
                a[i * n + j] = (a[i * n + j] * pivot - lead * a[k * n + j]) / prev;
            }
            a[i * n + k] = 0;
        }
        prev = pivot;
    }
    T det = a[(n - 1) * n + (n - 1)];
    return sign < 0 ? T(-det) : det;
}

BigInt from_i128(i128 v) {
    const bool negative = v < 0;
    unsigned __int128 mag = negative ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    const auto hi = static_cast<std::uint64_t>(mag >> 64);
    const auto lo = static_cast<std::uint64_t>(mag);
    BigInt out;
    const std::uint64_t words[2] = {lo, hi};
    mpz_import(out.get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, words);
    return negative ? BigInt(-out) : out;
}

// Row-reduces a rational matrix in place to reduced row echelon form and returns pivot columns.
std::vector<std::size_t> rref(std::vector<Rational>& a, std::size_t rows, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t sel = r;
        while (sel < rows && a[sel * cols + c] == 0) ++sel;
        if (sel == rows) continue;
        if (sel != r)
            for (std::size_t j = 0; j < cols; ++j) std::swap(a[sel * cols + j], a[r * cols + j]);
        const Rational inv = 1 / a[r * cols + c];
        for (std::size_t j = c; j < cols; ++j) a[r * cols + j] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i * cols + c] == 0) continue;
            const Rational factor = a[i * cols + c];
            for (std::size_t j = c; j < cols; ++j) a[i * cols + j] -= factor * a[r * cols + j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

BigInt det_exact(const IntMatrix& m) {
    require(m.square(), "det_exact: matrix must be square");
    const std::size_t n = m.rows();
    if (n == 0) return BigInt(1);
    const double bound = log2_hadamard_bound(m);
    if (bound < 0) return BigInt(0);
    if (bound < 61.0) {
        std::vector<i128> a(m.data().begin(), m.data().end());
        return from_i128(bareiss_det(std::move(a), n));
    }
    std::vector<BigInt> a;
    a.reserve(n * n);
    for (auto v : m.data()) a.emplace_back(static_cast<long>(v));
    return bareiss_det(std::move(a), n);
}

bool is_singular_exact(const IntMatrix& m) { return det_exact(m) == 0; }

std::size_t rank_exact(const IntMatrix& m) {
    std::vector<Rational> a;
    a.reserve(m.rows() * m.cols());
    for (auto v : m.data()) a.emplace_back(static_cast<long>(v));
    return rref(a, m.rows(), m.cols()).size();
}

NormalVector unit_normal(std::span<const std::vector<std::int64_t>> columns) {
    require(!columns.empty(), "unit_normal: need n - 1 >= 1 columns");
    const std::size_t n = columns.front().size();
    require(n >= 2, "unit_normal: dimension must be at least 2");
    require(columns.size() == n - 1, "unit_normal: expected exactly n - 1 columns");
    for (const auto& c : columns) require(c.size() == n, "unit_normal: column length mismatch");

    const std::size_t rows = n - 1;
    std::vector<Rational> a;
    a.reserve(rows * n);
    for (const auto& c : columns)
        for (auto v : c) a.emplace_back(static_cast<long>(v));
    const auto pivots = rref(a, rows, n);
    if (pivots.size() < rows) throw DegenerateNullspace(n - pivots.size());

    std::size_t free_col = n - 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        if (pivots[i] != i) {
            free_col = i;
            break;
        }
    }
    std::vector<Rational> basis(n, Rational(0));
    basis[free_col] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) basis[pivots[i]] = -a[i * n + free_col];

    // Clear denominators to get a primitive integer normal, then scale into doubles.
    BigInt lcm = 1;
    for (const auto& q : basis) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den_mpz_t());
    std::vector<BigInt> ints(n);
    for (std::size_t i = 0; i < n; ++i) ints[i] = basis[i].get_num() * (lcm / basis[i].get_den());

    long max_exp = std::numeric_limits<long>::min();
    for (const auto& z : ints) {
        if (z == 0) continue;
        long e = 0;
        mpz_get_d_2exp(&e, z.get_mpz_t());
        max_exp = std::max(max_exp, e);
    }
    NormalVector out;
    out.coords.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (ints[i] == 0) continue;
        long e = 0;
        const double mant = mpz_get_d_2exp(&e, ints[i].get_mpz_t());
        out.coords[i] = std::ldexp(mant, static_cast<int>(e - max_exp));
    }
    long double norm_sq = 0;
    for (double v : out.coords) norm_sq += static_cast<long double>(v) * v;
    const double norm = static_cast<double>(std::sqrt(norm_sq));
    double sign = 1.0;
    for (double v : out.coords) {
        if (v != 0.0) {
            sign = v > 0 ? 1.0 : -1.0;
            break;
        }
    }
    for (double& v : out.coords) v = sign * v / norm;

    for (const auto& c : columns) {
        long double dot = 0;
        for (std::size_t i = 0; i < n; ++i) dot += static_cast<long double>(out.coords[i]) * c[i];
        out.residual = std::max(out.residual, static_cast<double>(std::fabs(dot)));
    }
    return out;
}

NormalVector unit_normal_of_leading_columns(const IntMatrix& m) {
    require(m.square() && m.rows() >= 2, "unit_normal_of_leading_columns: need square n >= 2");
    std::vector<std::vector<std::int64_t>> cols;
    cols.reserve(m.cols() - 1);
    for (std::size_t c = 0; c + 1 < m.cols(); ++c) cols.push_back(m.column(c));
    return unit_normal(cols);
}

double smin(const RealMatrix& m) {
    require(m.rows() == m.cols(), "smin: matrix must be square");
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<RealMatrix> svd(m);
    return svd.singularValues().minCoeff();
}

double spectral_norm(const RealMatrix& m) {
    require(m.rows() == m.cols(), "spectral_norm: matrix must be square");
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<RealMatrix> svd(m);
    return svd.singularValues().maxCoeff();
}

}  // namespace rbsing
