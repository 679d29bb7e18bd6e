#pragma once

#include <cstdint>

namespace hetnetcov {

// xoshiro256++ with splitmix64 seeding (Blackman & Vigna).  Hand-rolled so
// that draws are bit-identical across standard libraries and across runs,
// which the reproducibility contract requires.  Substreams are derived by
// mixing (seed, stream, substream) through splitmix64, so every realization
// or distance sample owns an independent, order-free stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, 0, 0) {}
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream);

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform();

  // Standard normal via Box-Muller; the spare value is cached.
  double normal();

  // Exponential with unit mean.
  double exponential();

  bool bernoulli(double p);

  // Poisson draw: sequential inversion for small means, transformed
  // rejection (Hoermann's PTRS) for mean >= 10.
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t s_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// splitmix64 step, exposed for deterministic hashing of stream labels.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace hetnetcov
