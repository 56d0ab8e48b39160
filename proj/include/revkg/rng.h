#ifndef REVKG_RNG_H_
#define REVKG_RNG_H_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace revkg {

// Fisher-Yates driven by raw mt19937_64 output. std::shuffle's draw sequence
// is library-specific, which would make saved models differ across
// toolchains for the same seed.
template <typename T>
void SeededShuffle(std::vector<T> &items, std::mt19937_64 &rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

// Uniform double in [0, 1) from the top 53 bits.
inline double UnitDouble(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace revkg

#endif  // REVKG_RNG_H_
