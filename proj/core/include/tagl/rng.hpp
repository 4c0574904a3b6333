#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace tagl {

using Rng = std::mt19937_64;

// SplitMix64 finaliser. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based seed derivation. The result depends only on the triple, so
// any instance range can be processed in any order and still see the same
// random stream.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ stream) + index);
}

// Named streams so that independent consumers of one master seed never
// collide.
namespace stream {
inline constexpr std::uint64_t kSplit = 0x5350'4c49'54ULL;
inline constexpr std::uint64_t kMask = 0x4d41'534bULL;
inline constexpr std::uint64_t kValidation = 0x5641'4cULL;
inline constexpr std::uint64_t kSchedule = 0x5343'4844ULL;
inline constexpr std::uint64_t kPredict = 0x5052'4544ULL;
inline constexpr std::uint64_t kTrain = 0x5452'4eULL;
inline constexpr std::uint64_t kInit = 0x494e'4954ULL;
inline constexpr std::uint64_t kDropout = 0x4452'4f50ULL;
inline constexpr std::uint64_t kOrdering = 0x4f52'44ULL;
inline constexpr std::uint64_t kSearch = 0x5345'4152ULL;
inline constexpr std::uint64_t kDataset = 0x4441'5441ULL;
inline constexpr std::uint64_t kSample = 0x534d'504cULL;
}  // namespace stream

// Uniform draw of `k` distinct indices from [0, n), returned sorted.
std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n,
                                                      std::uint32_t k,
                                                      Rng& rng);

// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::size_t j = pick(rng);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace tagl
