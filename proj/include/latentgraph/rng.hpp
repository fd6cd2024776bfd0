#pragma once

#include <cstdint>
#include <vector>

namespace lg {

// Counter-based 64-bit generator (splitmix64 finalizer over key+counter).
// Streams derived from (base_seed, run_index) are independent of the order
// in which runs are scheduled, so grid results do not depend on worker
// interleaving.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key), counter_(0) {}

  static std::uint64_t derive_key(std::uint64_t base_seed, std::uint64_t run_index);

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double next_double();

  // Uniform integer in [0, n), n > 0.
  std::uint64_t next_below(std::uint64_t n);

  // Standard normal via Box-Muller (deterministic across platforms).
  double next_gaussian();

  // Fisher-Yates shuffle of indices 0..n-1.
  std::vector<int> permutation(int n);

  // k distinct values sampled from 0..n-1, in draw order.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lg
