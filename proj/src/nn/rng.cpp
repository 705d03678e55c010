#include "mofuse/nn/rng.hpp"

#include "mofuse/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mofuse::nn {

namespace {

constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), key_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

std::uint64_t Rng::next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * golden_gamma);
}

double Rng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
    // Rejection on the top of the range keeps the result unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = next_u64();
    while (x >= limit) {
        x = next_u64();
    }
    return x % n;
}

double Rng::normal() noexcept {
    // 1 - u lies in (0, 1], so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Rng Rng::split(std::uint64_t stream) const noexcept {
    return Rng(seed_, mix64(key_ ^ mix64(stream + golden_gamma)));
}

Matrix standard_normal(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix out(rows, cols);
    for (double& v : out.data()) {
        v = rng.normal();
    }
    return out;
}

void shuffle(Rng& rng, std::vector<std::size_t>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

std::vector<std::size_t> permutation(Rng& rng, std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    shuffle(rng, idx);
    return idx;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> uniform_split(Rng& rng, std::size_t n, double fraction) {
    if (n < 2) {
        throw DataError("cannot split fewer than 2 samples (got " + std::to_string(n) + ")");
    }
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ConfigError("split fraction must lie in (0, 1), got " + std::to_string(fraction));
    }
    const auto perm = permutation(rng, n);
    const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    std::vector<std::size_t> a(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(count));
    std::vector<std::size_t> b(perm.begin() + static_cast<std::ptrdiff_t>(count), perm.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return {std::move(a), std::move(b)};
}

}  // namespace mofuse::nn
