#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "common/errors.hpp"
#include "common/rational.hpp"

namespace rbsing {

template <typename Prob>
Prob prob_from_rational(const Rational& q);

template <>
inline Rational prob_from_rational<Rational>(const Rational& q) {
    return q;
}

template <>
inline double prob_from_rational<double>(const Rational& q) {
    return q.get_d();
}

inline double as_double(double v) { return v; }
inline double as_double(const Rational& v) { return v.get_d(); }

/// Finitely supported law on the real line, atoms sorted by position and distinct.
template <typename Point, typename Prob>
class DiscreteLaw {
public:
    DiscreteLaw() = default;
    DiscreteLaw(std::vector<Point> points, std::vector<Prob> probs)
        : points_(std::move(points)), probs_(std::move(probs)) {
        require(points_.size() == probs_.size(), "DiscreteLaw: size mismatch");
        for (std::size_t i = 1; i < points_.size(); ++i)
            require(points_[i - 1] < points_[i], "DiscreteLaw: points must be strictly increasing");
    }

    static DiscreteLaw point_mass(Point at) { return DiscreteLaw({at}, {Prob(1)}); }

    std::size_t size() const noexcept { return points_.size(); }
    std::span<const Point> points() const noexcept { return points_; }
    std::span<const Prob> probs() const noexcept { return probs_; }

    Prob total() const {
        Prob s = 0;
        for (const auto& q : probs_) s += q;
        return s;
    }

    Prob mass_at(Point x) const {
        auto it = std::lower_bound(points_.begin(), points_.end(), x);
        if (it == points_.end() || *it != x) return Prob(0);
        return probs_[static_cast<std::size_t>(it - points_.begin())];
    }

    Prob max_atom() const {
        Prob best = 0;
        for (const auto& q : probs_)
            if (q > best) best = q;
        return best;
    }

    /// Law of (Z + b * shift) with b ~ Bernoulli(p) independent of Z.
    DiscreteLaw convolve_two_point(Point shift, const Prob& p) const {
        const Prob q = Prob(1) - p;
        DiscreteLaw out;
        out.points_.reserve(points_.size() * 2);
        out.probs_.reserve(points_.size() * 2);
        std::size_t i = 0, j = 0;
        const std::size_t m = points_.size();
        auto push = [&](Point x, Prob w) {
            if (!out.points_.empty() && out.points_.back() == x)
                out.probs_.back() += w;
            else {
                out.points_.push_back(x);
                out.probs_.push_back(std::move(w));
            }
        };
        while (i < m || j < m) {
            const bool take_left = j == m || (i < m && points_[i] <= points_[j] + shift);
            if (take_left) {
                push(points_[i], probs_[i] * q);
                ++i;
            } else {
                push(points_[j] + shift, probs_[j] * p);
                ++j;
            }
        }
        return out;
    }

    friend bool operator==(const DiscreteLaw&, const DiscreteLaw&) = default;

private:
    std::vector<Point> points_;
    std::vector<Prob> probs_;
};

/// Law of sum b_i x_i over the integer lattice.
template <typename Prob>
using IntegerPmf = DiscreteLaw<std::int64_t, Prob>;
using ExactPmf = IntegerPmf<Rational>;
using FloatPmf = IntegerPmf<double>;

/// Law of sum b_i y_i for real coefficients (atoms at distinct doubles).
using RealLaw = DiscreteLaw<double, double>;

/// Largest mass of a closed window [a, a + width] (strict: open-width windows, gap < width).
template <typename Point, typename Prob>
Prob max_window_mass(const DiscreteLaw<Point, Prob>& law, double width, bool strict = false) {
    const auto pts = law.points();
    const auto prb = law.probs();
    Prob best = 0;
    Prob running = 0;
    std::size_t left = 0;
    for (std::size_t right = 0; right < pts.size(); ++right) {
        running += prb[right];
        while (true) {
            const double gap = static_cast<double>(pts[right] - pts[left]);
            const bool too_wide = strict ? gap >= width : gap > width;
            if (!too_wide || left == right) break;
            running -= prb[left];
            ++left;
        }
        if (strict && static_cast<double>(pts[right] - pts[left]) >= width) continue;
        if (running > best) best = running;
    }
    return best;
}

}  // namespace rbsing
