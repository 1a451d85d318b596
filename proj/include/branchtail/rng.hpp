#pragma once

#include <cstdint>
#include <random>

namespace branchtail {

// SplitMix64 finalizer, used to derive well-separated engine seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Splittable random stream: a (master_seed, stream_index) pair determines the
// whole sequence, so replicated work can be farmed out in any order and still
// reproduce bit for bit.  One stream per independent task.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : master_(master_seed),
        stream_(stream_index),
        engine_(mix(master_seed, stream_index)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0,1], 53-bit resolution; never returns 0, so it is safe to
  // feed into log() and inversion formulas of the form (c/U)^(1/alpha).
  double next_unit_open() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  std::mt19937_64& engine() { return engine_; }
  std::uint64_t master_seed() const { return master_; }
  std::uint64_t stream_index() const { return stream_; }

 private:
  static std::uint64_t mix(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = splitmix64(master ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    return splitmix64(z + master);
  }

  std::uint64_t master_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace branchtail
