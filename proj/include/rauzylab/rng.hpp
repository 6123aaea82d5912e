#ifndef RAUZYLAB_RNG_HPP
#define RAUZYLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace rauzylab {

// Seeded RNG with hand-rolled variate transforms so that sampled streams are
// reproducible across standard library implementations (std distributions are
// not pinned by the C++ standard; mt19937_64 is).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // uniform in (0,1); never returns 0 or 1
  double uniform() {
    // 53 random mantissa bits, offset by half an ulp
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  std::uint64_t below(std::uint64_t n) {
    // modulo bias is negligible for n << 2^64 and irrelevant for tests
    return engine_() % n;
  }

  double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u = uniform(), v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    cached_ = r * std::sin(2.0 * M_PI * v);
    have_cached_ = true;
    return r * std::cos(2.0 * M_PI * v);
  }

  // uniform point on the open standard simplex (coordinates sum to 1)
  std::vector<double> simplex(std::size_t d) {
    std::vector<double> x(d);
    double s = 0.0;
    for (auto& xi : x) {
      xi = exponential();
      s += xi;
    }
    for (auto& xi : x) xi /= s;
    return x;
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace rauzylab

#endif
