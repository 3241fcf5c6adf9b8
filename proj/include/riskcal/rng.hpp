#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace riskcal {

// Counter-based generator: the i-th output for a key is
// splitmix64_mix(key + i * 0x9E3779B97F4A7C15), i = 1, 2, ...
// The stream is a pure function of (key, counter) so any draw can be
// replayed without running the ones before it.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    // Key for one sweep cell: mix(mix(mix(seed) ^ size) ^ repetition).
    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t size,
                                    std::uint64_t repetition) noexcept;

    std::uint64_t next() noexcept;

    // Uniform integer in [0, bound) by Lemire's multiply-shift with rejection;
    // bound must be positive.
    std::uint64_t uniform_below(std::uint64_t bound) noexcept;

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t x) noexcept;

// n distinct positions of [0, population) via partial Fisher-Yates over the
// identity permutation, in draw order.
std::vector<std::size_t> sample_without_replacement(CounterRng& rng, std::size_t population,
                                                    std::size_t n);

std::vector<std::size_t> sample_with_replacement(CounterRng& rng, std::size_t population,
                                                 std::size_t n);

}  // namespace riskcal
