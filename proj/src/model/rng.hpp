#pragma once

#include <array>
#include <cstdint>

namespace rbsing {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// 64-bit mixer used to derive stream identifiers from structured tags.
std::uint64_t mix64(std::uint64_t x);

/// Stream id for a (experiment tag, trial index) lane.
std::uint64_t derive_stream(std::uint64_t tag, std::uint64_t index);

/// (master, stream) pair. Identical seeds produce identical streams.
struct RngSeed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;

    friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Counter-based generator: draw k of a stream is Philox(key = master, counter = (k, stream)).
/// Draws are a pure function of (master, stream, k), so any scheduling of
/// independent lanes reproduces the same bytes.
class CounterRng {
public:
    explicit CounterRng(RngSeed seed, std::uint64_t start = 0) : seed_(seed), counter_(start) {}

    /// Value at an absolute position of the stream; does not advance.
    std::uint64_t at(std::uint64_t position) const;

    std::uint64_t next_u64() { return at(counter_++); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by Lemire's multiply-and-reject.
    std::uint64_t next_below(std::uint64_t bound);

    /// Uniform integer in [lo, hi].
    std::int64_t next_in(std::int64_t lo, std::int64_t hi);

    std::uint64_t position() const { return counter_; }
    RngSeed seed() const { return seed_; }

private:
    RngSeed seed_;
    std::uint64_t counter_;
};

}  // namespace rbsing
