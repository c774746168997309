#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "common/errors.hpp"

namespace rbsing {

/// Dense row-major matrix of exact (64-bit) integers.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols, std::int64_t fill = 0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    IntMatrix(std::size_t rows, std::size_t cols, std::vector<std::int64_t> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        require(data_.size() == rows_ * cols_, "IntMatrix: data size does not match shape");
    }
    IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows);

    static IntMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    std::int64_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::int64_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

    std::span<const std::int64_t> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::vector<std::int64_t> column(std::size_t c) const;
    std::span<const std::int64_t> data() const noexcept { return data_; }

    IntMatrix transposed() const;
    std::int64_t min_entry() const;
    std::int64_t max_entry() const;

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::int64_t> data_;
};

using RealMatrix = Eigen::MatrixXd;

RealMatrix to_real(const IntMatrix& m);

}  // namespace rbsing
