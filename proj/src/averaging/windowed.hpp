#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <vector>

#include "common/errors.hpp"
#include "common/rational.hpp"

namespace rbsing {

inline constexpr std::size_t kDefaultWindowCap = std::size_t{1} << 26;

/// Non-negative function on Z supported on the window [offset, offset + size).
template <typename Scalar = double>
class WindowedFunction {
public:
    WindowedFunction() = default;
    WindowedFunction(std::int64_t offset, std::vector<Scalar> values) : offset_(offset), values_(std::move(values)) {
        for (const auto& v : values_) require(v >= 0, "WindowedFunction: values must be non-negative");
        mass_ = sum();
    }

    static WindowedFunction point_mass(std::int64_t at, Scalar weight = Scalar(1)) {
        return WindowedFunction(at, std::vector<Scalar>{weight});
    }

    std::int64_t offset() const { return offset_; }
    /// One past the last window point.
    std::int64_t end() const { return offset_ + static_cast<std::int64_t>(values_.size()); }
    std::size_t size() const { return values_.size(); }
    const std::vector<Scalar>& values() const { return values_; }

    Scalar operator()(std::int64_t t) const {
        if (t < offset_ || t >= end()) return Scalar(0);
        return values_[static_cast<std::size_t>(t - offset_)];
    }

    /// Tracked l1 mass (updated algebraically by the operations, not re-summed).
    const Scalar& mass() const { return mass_; }
    const Scalar& truncation_loss() const { return truncation_loss_; }

    Scalar sum() const {
        Scalar s = 0;
        for (const auto& v : values_) s += v;
        return s;
    }

    Scalar max_value() const {
        Scalar best = 0;
        for (const auto& v : values_)
            if (v > best) best = v;
        return best;
    }

    /// Smallest t attaining the maximum.
    std::int64_t argmax() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < values_.size(); ++i)
            if (values_[i] > values_[best]) best = i;
        return offset_ + static_cast<std::int64_t>(best);
    }

    /// |tracked mass - recomputed sum|.
    double mass_drift() const { return std::fabs(as_double_scalar(mass_ - sum())); }

    /// Keeps the length-`cap` window of largest mass and books the rest as truncation loss.
    void truncate_to(std::size_t cap) {
        if (values_.size() <= cap) return;
        Scalar running = 0, best = 0;
        std::size_t best_start = 0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            running += values_[i];
            if (i >= cap) running -= values_[i - cap];
            if (i + 1 >= cap && running > best) {
                best = running;
                best_start = i + 1 - cap;
            }
        }
        Scalar dropped = 0;
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (i < best_start || i >= best_start + cap) dropped += values_[i];
        values_ = std::vector<Scalar>(values_.begin() + static_cast<std::ptrdiff_t>(best_start),
                                      values_.begin() + static_cast<std::ptrdiff_t>(best_start + cap));
        offset_ += static_cast<std::int64_t>(best_start);
        mass_ -= dropped;
        truncation_loss_ += dropped;
    }

    void add_truncation_loss(const Scalar& loss) { truncation_loss_ += loss; }

    static double as_double_scalar(const Scalar& v) {
        if constexpr (std::is_same_v<Scalar, Rational>)
            return v.get_d();
        else
            return static_cast<double>(v);
    }

    /// Assembles a function with explicit mass bookkeeping (values are trusted non-negative).
    static WindowedFunction from_parts(std::int64_t offset, std::vector<Scalar> values, Scalar mass, Scalar loss) {
        WindowedFunction f;
        f.offset_ = offset;
        f.values_ = std::move(values);
        f.mass_ = std::move(mass);
        f.truncation_loss_ = std::move(loss);
        return f;
    }

private:
    std::int64_t offset_ = 0;
    std::vector<Scalar> values_;
    Scalar mass_ = 0;
    Scalar truncation_loss_ = 0;
};

/// f'(t) = (1 - p) f(t) + p f(t + X), on the union of the two shifted windows.
template <typename Scalar>
WindowedFunction<Scalar> average_step(const WindowedFunction<Scalar>& f, std::int64_t X, const Scalar& p,
                                      std::size_t window_cap = kDefaultWindowCap) {
    require(p >= 0 && p <= 1, "average_step: p must lie in [0, 1]");
    const Scalar q = Scalar(1) - p;
    if (f.values().empty()) return f;
    const std::int64_t lo = std::min(f.offset(), f.offset() - X);
    const std::int64_t hi = std::max(f.end(), f.end() - X);
    const auto width = static_cast<std::size_t>(hi - lo);
    if (width > 4 * window_cap) throw BudgetExceeded("average_step: window too large", width, window_cap);
    std::vector<Scalar> values(width, Scalar(0));
    const auto base = static_cast<std::size_t>(f.offset() - lo);
    const auto shifted = static_cast<std::size_t>(f.offset() - X - lo);
    const auto& src = f.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        values[base + i] += q * src[i];
        values[shifted + i] += p * src[i];
    }
    auto out = WindowedFunction<Scalar>::from_parts(lo, std::move(values), f.mass(), f.truncation_loss());
    out.truncate_to(window_cap);
    return out;
}

/// sum_{t in [lo, hi]} f(t)
template <typename Scalar>
Scalar interval_mass(const WindowedFunction<Scalar>& f, std::int64_t lo, std::int64_t hi) {
    Scalar s = 0;
    const std::int64_t a = std::max(lo, f.offset());
    const std::int64_t b = std::min(hi, f.end() - 1);
    for (std::int64_t t = a; t <= b; ++t) s += f(t);
    return s;
}

struct WindowMax {
    double mass = 0.0;
    std::int64_t start = 0;  // left end of the best length-N window
};

/// Largest mass over integer intervals of cardinality N.
template <typename Scalar>
WindowMax max_interval_mass(const WindowedFunction<Scalar>& f, std::size_t N) {
    require(N >= 1, "max_interval_mass: N must be positive");
    const auto& v = f.values();
    WindowMax best{0.0, f.offset()};
    if (v.empty()) return best;
    if (v.size() <= N) return {WindowedFunction<Scalar>::as_double_scalar(f.sum()), f.offset()};
    Scalar running = 0;
    Scalar top = -1;
    for (std::size_t i = 0; i < v.size(); ++i) {
        running += v[i];
        if (i >= N) running -= v[i - N];
        if (i + 1 >= N && running > top) {
            top = running;
            best.start = f.offset() + static_cast<std::int64_t>(i + 1 - N);
        }
    }
    best.mass = WindowedFunction<Scalar>::as_double_scalar(top);
    return best;
}

}  // namespace rbsing
