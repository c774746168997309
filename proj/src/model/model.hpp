#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "common/rational.hpp"
#include "model/matrix.hpp"
#include "model/rng.hpp"

namespace rbsing {

/// Parameters of the shifted Bernoulli model B_n(p) + s * 1 1^T.
/// The endpoints p = 0 and p = 1 are accepted as degenerate models.
struct ModelParams {
    std::size_t n = 1;
    Rational p{1, 2};
    Rational s{0};

    void validate() const;
};

/// Bernoulli(p) coin driven by a 64-bit uniform: heads iff u < floor(p * 2^64).
/// Bias relative to p is at most 2^-64; p = 1 is special-cased to always succeed.
class BernoulliCoin {
public:
    explicit BernoulliCoin(const Rational& p);
    bool operator()(std::uint64_t u) const noexcept { return always_ || u < threshold_; }

private:
    std::uint64_t threshold_ = 0;
    bool always_ = false;
};

/// Entry (i, j) consumes draw i * n + j of the stream, so matrices built
/// from a shared seed are entrywise coupled across samplers.
IntMatrix sample_bernoulli_matrix(const ModelParams& params, RngSeed seed);
IntMatrix sample_bernoulli_matrix(std::size_t n, const Rational& p, RngSeed seed);

/// Uniform +-1 entries; equals 2 * sample_bernoulli_matrix(n, 1/2, seed) - 1 exactly.
IntMatrix sample_sign_matrix(std::size_t n, RngSeed seed);

std::vector<std::int64_t> sample_bernoulli_vector(std::size_t n, const Rational& p, RngSeed seed);

/// B + s * 1 1^T in floating point.
RealMatrix shifted_matrix(const IntMatrix& b, const Rational& s);

/// den(s) * B + num(s) * 1 1^T: an integer matrix with the same kernel as B + s 1 1^T.
IntMatrix scaled_shifted_matrix(const IntMatrix& b, const Rational& s);

/// Removes the last row (B_n(p) -> B_n^1(p)).
IntMatrix drop_last_row(const IntMatrix& b);

}  // namespace rbsing
