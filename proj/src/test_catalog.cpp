#include "kneesim/test_catalog.hpp"

#include <cctype>

#include "kneesim/errors.hpp"

namespace kneesim::harness {

std::string TestId::str() const {
  std::string s;
  s += path_class;
  s += length_class;
  s += std::to_string(n_users);
  if (modifier) s += modifier;
  return s;
}

TestId TestId::parse(const std::string& text) {
  TestId id;
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError("test id '" + text + "': " + msg);
  };
  if (text.size() < 3) fail("expected <path><length><users>[modifier]");
  id.path_class = text[0];
  if (std::string("HNSM").find(id.path_class) == std::string::npos)
    fail("path class must be one of H, N, S, M");
  id.length_class = text[1];
  if (id.length_class != 'D' && id.length_class != 'R')
    fail("length class must be D or R");
  i = 2;
  std::size_t digits = 0;
  int n = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    n = n * 10 + (text[i] - '0');
    ++i;
    ++digits;
  }
  if (digits == 0 || n < 1) fail("user count must be a positive integer");
  id.n_users = n;
  if (i < text.size()) {
    id.modifier = text[i++];
    if (std::string("THSB").find(id.modifier) == std::string::npos)
      fail("modifier must be one of T, H, S, B");
  }
  if (i != text.size()) fail("trailing characters after modifier");
  return id;
}

namespace {

// Path catalog. Service rates are reference packets per second; knees were
// chosen so each class has a clean power maximum:
//   H: 4 x 10/s                  -> base rtt 0.4s, knee 4
//   N: 20, 10, 5, 10             -> base rtt 0.45s, knee 2 (node 2 bottleneck)
//   S: 4 x 10/s + sat(10, 0.5s)  -> base rtt 1.0s, knee 10
//   M: N path + sat(10, 0.5s)    -> base rtt 1.05s, knee 5
//   ND9 special: 7.5, 7.5, 5, 7.5 -> base rtt 0.6s, knee exactly 3
std::vector<sim::PathNode> make_path(char path_class, bool nd9) {
  std::vector<double> rates;
  bool satellite = false;
  if (nd9) {
    rates = {7.5, 7.5, 5.0, 7.5};
  } else {
    switch (path_class) {
      case 'H': rates = {10.0, 10.0, 10.0, 10.0}; break;
      case 'N': rates = {20.0, 10.0, 5.0, 10.0}; break;
      case 'S': rates = {10.0, 10.0, 10.0, 10.0}; satellite = true; break;
      case 'M': rates = {20.0, 10.0, 5.0, 10.0}; satellite = true; break;
    }
  }
  std::vector<sim::PathNode> path;
  for (double r : rates)
    path.push_back({static_cast<int>(path.size()), r, 0.0});
  if (satellite)
    path.push_back({static_cast<int>(path.size()), 10.0, 0.5});
  return path;
}

}  // namespace

double catalog_knee(const TestId& id) {
  if (id.path_class == 'N' && id.length_class == 'D' && id.n_users == 9)
    return 3.0;
  switch (id.path_class) {
    case 'H': return 4.0;
    case 'N': return 2.0;
    case 'S': return 10.0;
    case 'M': return 5.0;
  }
  throw ConfigError("unknown path class");
}

sim::SimConfig build_test_config(const TestId& id) {
  bool nd9 = id.path_class == 'N' && id.length_class == 'D' && id.n_users == 9;
  sim::SimConfig cfg;
  cfg.path = make_path(id.path_class, nd9);
  cfg.length_model.kind = id.length_class == 'R' ? sim::LengthKind::exponential
                                                 : sim::LengthKind::constant;
  cfg.length_model.length = 1.0;
  cfg.length_model.mean = 1.0;

  long packets;
  if (id.n_users == 1)
    packets = 5000;
  else if (id.n_users <= 4)
    packets = 2000;
  else
    packets = 800;

  double knee = catalog_knee(id);
  for (int u = 0; u < id.n_users; ++u) {
    sim::UserSpec spec;
    spec.user_id = u;
    spec.total_packets = packets;
    spec.w_max = 64;
    if (id.modifier == 'H') spec.initial_window = 4.0 * knee;
    if (id.modifier == 'S' && u > 0) spec.start = {u - 1, 0.10};
    if (id.modifier == 'B')
      spec.source_rate = cfg.path[cfg.bottleneck_node()].service_rate / 2.0;
    cfg.users.push_back(spec);
  }
  if (id.modifier == 'T') {
    cfg.transient.enabled = true;
    cfg.transient.target_node = cfg.bottleneck_node();
    cfg.transient.middle_rate =
        0.4 * cfg.path[cfg.transient.target_node].service_rate;
  }
  return cfg;
}

}  // namespace kneesim::harness
