#include "kneesim/rng.hpp"

namespace kneesim::sim {

std::uint64_t mix_seed(std::uint64_t run_seed, std::uint64_t stream_id) {
  // splitmix64: run the seed forward by stream_id+1 increments and finalize.
  std::uint64_t x = run_seed + (stream_id + 1) * 0x9e3779b97f4a7c15ULL;
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace kneesim::sim
