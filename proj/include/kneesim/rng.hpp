#pragma once

#include <cstdint>
#include <random>

namespace kneesim::sim {

// splitmix64 finalizer; derives independent substream seeds from
// (run_seed, stream_id) so that adding an instrumentation stream never
// perturbs the draws of existing streams.
std::uint64_t mix_seed(std::uint64_t run_seed, std::uint64_t stream_id);

// One deterministic uniform stream per stochastic entity (e.g. the packet
// length stream of one user). Backed by mt19937_64, whose output sequence is
// fixed by the standard, with a documented [0,1) mapping: the top 53 bits of
// each 64-bit draw scaled by 2^-53. Stable across platforms and versions.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t run_seed, std::uint64_t stream_id)
      : gen_(mix_seed(run_seed, stream_id)) {}

  // Uniform in [0, 1).
  double next_unit() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1); rejects exact zeros so log transforms stay finite.
  double next_unit_positive() {
    double u = next_unit();
    while (u <= 0.0) u = next_unit();
    return u;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace kneesim::sim
