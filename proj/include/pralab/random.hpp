#pragma once

#include <cstdint>
#include <random>

namespace pralab
{

/**
 * Reproducible generator: std::mt19937_64 (whose output sequence is fixed
 * by the standard) with bounded draws by rejection sampling, so a seed
 * gives the same stream on every platform. The standard distributions are
 * avoided because their algorithms are implementation-defined.
 */
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n)
  {
    std::uint64_t const limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
      std::uint64_t const x = engine_();
      if (x < limit)
        return x % n;
    }
  }

private:
  std::mt19937_64 engine_;
};

} // namespace pralab
