#pragma once

#include <cstdint>
#include <random>

namespace arom {

/// Seeded generator whose draws are reproducible across standard libraries.
///
/// The engine is std::mt19937_64 (its output sequence is fixed by the C++
/// standard). The distribution helpers below are implemented here rather than
/// through <random>'s distributions, whose algorithms are library-specific:
///   - index(n): rejection sampling on the raw 64-bit output, then `x % n`.
///   - uniform(): top 53 bits of one raw draw, scaled by 2^-53, in [0, 1).
///   - normal(): Box-Muller over two uniform() draws, cosine branch only.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::uint64_t index(std::uint64_t n);
  double uniform();
  double normal();

private:
  std::mt19937_64 engine_;
};

}  // namespace arom
