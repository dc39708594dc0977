#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace teleran::sim {

// 64-bit mixing function used to derive independent seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Stable FNV-1a hash of a label (std::hash is not stable across builds).
std::uint64_t label_hash(std::string_view label);

// Seed for (master, label, index) triples such as per-episode seeds.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label,
                          std::uint64_t index = 0);

// A labelled random-number stream. Equal (label, seed) pairs give identical
// sequences; different labels under one seed give decorrelated engines.
class RngStream {
 public:
  RngStream(std::string label, std::uint64_t seed);

  const std::string& label() const { return label_; }
  std::uint64_t seed() const { return seed_; }

  double uniform() { return unit_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
  double normal(double mean = 0.0, double stddev = 1.0);
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  std::uint64_t next_u64() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::string label_;
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace teleran::sim
