#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace rear::stats {

// Identifies one random substream. Two equal labels under the same master
// seed always produce the same sequence, whatever thread asks for it.
struct StreamLabel {
  std::string_view analysis;  // "h1" ... "h5", or a test tag
  std::int64_t window = 0;    // k, or 0 when not applicable
  std::uint64_t index = 0;    // event index, permutation replicate, ...
  std::string_view purpose;   // "control", "perm", "bootstrap", ...
};

// Random stream: std::mt19937_64 seeded with a SplitMix64-mixed label hash.
// Integer and real draws are done here rather than through <random>
// distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  // Uniform in [0, n). n must be > 0. Lemire's multiply-and-reject method.
  std::uint64_t below(std::uint64_t n);

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

class RandomPlan {
 public:
  // Bumped whenever the derivation or the draw algorithms change.
  static constexpr std::string_view kGeneratorVersion = "mt19937_64+splitmix64/v1";

  explicit RandomPlan(std::uint64_t master_seed) : master_seed_(master_seed) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t derive(const StreamLabel& label) const;
  Rng stream(const StreamLabel& label) const { return Rng(derive(label)); }

 private:
  std::uint64_t master_seed_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rear::stats
