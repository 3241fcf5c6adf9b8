#include "riskcal/rng.hpp"

#include <numeric>
#include <utility>

#include "riskcal/error.hpp"

namespace riskcal {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t CounterRng::derive_key(std::uint64_t seed, std::uint64_t size,
                                     std::uint64_t repetition) noexcept {
    std::uint64_t k = splitmix64_mix(seed + kGolden);
    k = splitmix64_mix(k ^ (size + kGolden));
    k = splitmix64_mix(k ^ (repetition + kGolden));
    return k;
}

std::uint64_t CounterRng::next() noexcept {
    ++counter_;
    return splitmix64_mix(key_ + counter_ * kGolden);
}

std::uint64_t CounterRng::uniform_below(std::uint64_t bound) noexcept {
    using u128 = unsigned __int128;
    std::uint64_t x = next();
    u128 m = static_cast<u128>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            x = next();
            m = static_cast<u128>(x) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::vector<std::size_t> sample_without_replacement(CounterRng& rng, std::size_t population,
                                                    std::size_t n) {
    if (n > population)
        fail(ErrorKind::SizeExceedsStratum, "sample size exceeds population");
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(population - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    return idx;
}

std::vector<std::size_t> sample_with_replacement(CounterRng& rng, std::size_t population,
                                                 std::size_t n) {
    if (population == 0 && n > 0)
        fail(ErrorKind::SizeExceedsStratum, "cannot sample from an empty population");
    std::vector<std::size_t> out(n);
    for (auto& v : out) v = static_cast<std::size_t>(rng.uniform_below(population));
    return out;
}

}  // namespace riskcal
