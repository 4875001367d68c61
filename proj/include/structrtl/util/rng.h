#ifndef STRUCTRTL_UTIL_RNG_H_
#define STRUCTRTL_UTIL_RNG_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace structrtl {

// Seeded generator with platform-independent derived distributions.
// std::*_distribution output is implementation-defined, so every draw the
// toolchain depends on for reproducibility goes through these helpers.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n). n must be positive.
  uint64_t Below(uint64_t n);

  // Uniform integer in [lo, hi].
  int64_t Range(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(Below(static_cast<uint64_t>(hi - lo + 1)));
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Standard normal via Box-Muller (no cached second value, so the stream
  // position depends only on the number of calls).
  double Normal();

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[Below(i)]);
    }
  }

  // k distinct indices from [0, n), in draw order. Requires k <= n.
  std::vector<size_t> SampleWithoutReplacement(size_t n, size_t k);

  // Derives an independent child seed; used to give subsystems their own
  // streams without coupling their consumption.
  uint64_t Fork() { return NextU64() ^ 0x9E3779B97F4A7C15ULL; }

  std::string SaveState() const;
  void LoadState(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

}  // namespace structrtl

#endif  // STRUCTRTL_UTIL_RNG_H_
