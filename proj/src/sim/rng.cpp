#include "teleran/sim/rng.hpp"

namespace teleran::sim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t label_hash(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed ^ label_hash(label)) + index);
}

RngStream::RngStream(std::string label, std::uint64_t seed)
    : label_(std::move(label)), seed_(seed), engine_(derive_seed(seed, label_)) {}

double RngStream::normal(double mean, double stddev) { return mean + stddev * gauss_(engine_); }

std::size_t RngStream::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

}  // namespace teleran::sim
