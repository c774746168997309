#include "model/model.hpp"

#include <algorithm>

#include "common/errors.hpp"

namespace rbsing {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        require(r.size() == cols_, "IntMatrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

std::vector<std::int64_t> IntMatrix::column(std::size_t c) const {
    std::vector<std::int64_t> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

IntMatrix IntMatrix::transposed() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

std::int64_t IntMatrix::min_entry() const {
    return data_.empty() ? 0 : *std::min_element(data_.begin(), data_.end());
}

std::int64_t IntMatrix::max_entry() const {
    return data_.empty() ? 0 : *std::max_element(data_.begin(), data_.end());
}

RealMatrix to_real(const IntMatrix& m) {
    RealMatrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<double>(m(r, c));
    return out;
}

void ModelParams::validate() const {
    require(n >= 1, "model: n must be at least 1");
    require(p >= 0 && p <= 1, "model: p must lie in [0, 1]");
    require(s >= -1 && s <= 0, "model: s must lie in [-1, 0]");
}

BernoulliCoin::BernoulliCoin(const Rational& p) {
    require(p >= 0 && p <= 1, "Bernoulli parameter must lie in [0, 1]");
    always_ = p == 1;
    threshold_ = scaled_threshold_u64(p);
}

IntMatrix sample_bernoulli_matrix(const ModelParams& params, RngSeed seed) {
    params.validate();
    return sample_bernoulli_matrix(params.n, params.p, seed);
}

IntMatrix sample_bernoulli_matrix(std::size_t n, const Rational& p, RngSeed seed) {
    require(n >= 1, "sample_bernoulli_matrix: n must be at least 1");
    const BernoulliCoin coin(p);
    const CounterRng rng(seed);
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = coin(rng.at(i * n + j)) ? 1 : 0;
    return m;
}

IntMatrix sample_sign_matrix(std::size_t n, RngSeed seed) {
    IntMatrix m = sample_bernoulli_matrix(n, Rational(1, 2), seed);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = 2 * m(i, j) - 1;
    return m;
}

std::vector<std::int64_t> sample_bernoulli_vector(std::size_t n, const Rational& p, RngSeed seed) {
    const BernoulliCoin coin(p);
    const CounterRng rng(seed);
    std::vector<std::int64_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = coin(rng.at(i)) ? 1 : 0;
    return v;
}

RealMatrix shifted_matrix(const IntMatrix& b, const Rational& s) {
    require(b.square(), "shifted_matrix: matrix must be square");
    RealMatrix out = to_real(b);
    out.array() += to_double(s);
    return out;
}

IntMatrix scaled_shifted_matrix(const IntMatrix& b, const Rational& s) {
    require(s.get_num().fits_slong_p() && s.get_den().fits_slong_p(),
            "scaled_shifted_matrix: shift has too large a denominator");
    const std::int64_t num = s.get_num().get_si();
    const std::int64_t den = s.get_den().get_si();
    IntMatrix out(b.rows(), b.cols());
    for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) = den * b(r, c) + num;
    return out;
}

IntMatrix drop_last_row(const IntMatrix& b) {
    require(b.rows() >= 2, "drop_last_row: matrix needs at least two rows");
    std::vector<std::int64_t> data(b.data().begin(), b.data().end() - static_cast<std::ptrdiff_t>(b.cols()));
    return IntMatrix(b.rows() - 1, b.cols(), std::move(data));
}

}  // namespace rbsing
