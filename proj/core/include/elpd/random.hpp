#pragma once

#include <cstdint>
#include <random>

namespace elpd {

// Seedable generator used everywhere randomness is needed.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. All variates are derived from raw engine output with the
// transforms below (not std:: distributions, whose algorithms are
// implementation-defined), so a seed reproduces the same stream on every
// standard library:
//   uniform      53 high bits of one engine word, scaled to [0, 1)
//   normal       Box-Muller on two open-interval uniforms, both values used
//   exponential  -log of an open-interval uniform
//   below(n)     rejection sampling on the top bits
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream keyed by (seed, stream); used for per-replicate and
  // per-task generators so results do not depend on scheduling.
  static Rng stream(std::uint64_t seed, std::uint64_t stream);

  double uniform();
  double uniform_open();
  double normal();
  double exponential();
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace elpd
