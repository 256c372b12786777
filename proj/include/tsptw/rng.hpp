#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace tsptw::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(const char* s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (; *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 0x100000001b3ull;
  return h;
}

// Seeded generator with mappings that do not depend on the standard library's
// distribution implementations, so identical seeds give identical corpora on
// any platform.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // [0, bound)
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  // [lo, hi] inclusive
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream from (root seed, lane, index). Generators use
// one lane per purpose and one index per record, so parallel and serial
// production of a corpus draw identical values.
inline Stream substream(std::uint64_t root_seed, std::uint64_t lane, std::uint64_t index = 0) {
  std::uint64_t s = root_seed;
  std::uint64_t a = splitmix64(s);
  s ^= lane * 0x9e3779b97f4a7c15ull;
  std::uint64_t b = splitmix64(s);
  s ^= index + 0x632be59bd9b4e019ull;
  std::uint64_t c = splitmix64(s);
  return Stream(a ^ (b * 0xff51afd7ed558ccdull) ^ c);
}

inline Stream substream(std::uint64_t root_seed, const char* lane, std::uint64_t index = 0) {
  return substream(root_seed, fnv1a(lane), index);
}

}  // namespace tsptw::rng
