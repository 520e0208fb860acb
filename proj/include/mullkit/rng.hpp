#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mullkit {

std::uint64_t splitmix64(std::uint64_t x);

/// Seedable 64-bit Mersenne Twister with portable (boost.random) variate
/// transforms. child(i) derives an independent stream for replicate or fold i
/// from the parent seed alone, so results do not depend on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  Rng child(std::uint64_t index) const;

  double uniform();  // [0, 1)
  double normal();
  double chi_squared(double df);
  double student_t(double df);  // Z / sqrt(V / df)
  bool bernoulli(double prob);
  std::uint64_t below(std::uint64_t bound);  // uniform integer in [0, bound)

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace mullkit
