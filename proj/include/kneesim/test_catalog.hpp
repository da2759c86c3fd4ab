#pragma once

#include <string>

#include "kneesim/sim_types.hpp"

namespace kneesim::harness {

// Test sequence identifier: path class (Homogeneous, Non-homogeneous,
// Satellite, Mixed), length class (Deterministic, Random), user count, and
// an optional condition modifier (Transient, High start, Staggered start,
// Bottlenecked source). String form e.g. "MD1T", "ND9", "MD4S".
struct TestId {
  char path_class = 'M';    // H, N, S, M
  char length_class = 'D';  // D, R
  int n_users = 1;
  char modifier = 0;        // 0, T, H, S, B

  std::string str() const;
  static TestId parse(const std::string& text);  // throws ConfigError
};

// Cataloged configuration for a test id. Path rates, knee windows and run
// lengths are fixed here; the knees are validated against find_knee in the
// test suite.
sim::SimConfig build_test_config(const TestId& id);

inline sim::SimConfig build_test_config(const std::string& id) {
  return build_test_config(TestId::parse(id));
}

// The knee (total window maximizing power) of the cataloged path class,
// before any transient: H=4, N=2, S=10, M=5; the special nine-user
// non-homogeneous path is tuned so its knee is 3.
double catalog_knee(const TestId& id);

}  // namespace kneesim::harness
