#pragma once

#include <cmath>
#include <cstdint>

namespace entot {

// Counter-based generator: output t is a pure function of (key, t), so
// regeneration with the same seed is bit-identical regardless of call order
// elsewhere, and sub-streams never overlap. The mixer is the splitmix64
// finalizer over key + counter * golden-ratio increment.
class Rng {
 public:
  explicit Rng(uint64_t key) : key_(key) {}

  // Independent child stream; id selects the branch.
  Rng child(uint64_t id) const { return Rng(mix(key_ ^ mix(id + 0x9E3779B97F4A7C15ULL))); }

  uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  // Uniform in (0, 1): top 53 bits, offset so 0 is excluded (safe for logs).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Box-Muller; platform-independent unlike std::normal_distribution.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0, n).
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

 private:
  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  uint64_t key_;
  uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace entot
