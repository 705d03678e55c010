#ifndef MOFUSE_NN_RNG_HPP
#define MOFUSE_NN_RNG_HPP

#include "mofuse/nn/matrix.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace mofuse::nn {

/**
 * Counter-based random source.
 *
 * The i-th draw is a pure function of (key, i): the SplitMix64 finalizer
 * applied to `key + (i + 1) * golden_gamma`. Nothing depends on the
 * standard library's distribution implementations, so a given seed yields
 * the same stream on every platform. `split()` derives an independent
 * stream, which is how each pipeline stage gets its own randomness without
 * threading generator state between stages.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t draws() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept;

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept;

    /// Uniform integer on [0, n), unbiased. n must be > 0.
    std::uint64_t below(std::uint64_t n) noexcept;

    /// Standard normal via Box-Muller (cosine branch only).
    double normal() noexcept;

    Rng split(std::uint64_t stream) const noexcept;

private:
    Rng(std::uint64_t seed, std::uint64_t key) noexcept : seed_(seed), key_(key) {}

    std::uint64_t seed_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

Matrix standard_normal(Rng& rng, std::size_t rows, std::size_t cols);

/// In-place Fisher-Yates shuffle.
void shuffle(Rng& rng, std::vector<std::size_t>& items);

/// 0..n-1 in random order.
std::vector<std::size_t> permutation(Rng& rng, std::size_t n);

/**
 * Random disjoint partition of 0..n-1 into (A, B) with |A| = round(fraction * n).
 * Both index sets are returned in ascending order.
 */
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> uniform_split(Rng& rng, std::size_t n, double fraction);

}  // namespace mofuse::nn

#endif
