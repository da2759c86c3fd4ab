#pragma once

#include <iosfwd>
#include <string>

#include "kneesim/sim_types.hpp"

namespace kneesim::harness {

// Line-oriented configuration format, diff-friendly and trivial to parse:
// sections [path], [users], [workload], [transient], [policy] containing
// `key = value` lines; comments start with '#'.
//
//   [path]
//   node = rate 10               # optional: prop <seconds>
//   node = rate 5 prop 0.5
//
//   [users]
//   user = packets 5000          # optional: id N, wmax N, start time0,
//                                # start after <pred> <frac>, source_rate R|inf,
//                                # initial_window W
//
//   [workload]
//   length = constant 1          # or: uniform lo hi | exponential mean |
//                                #     bimodal l1 l2 p1 | erlang mean shape
//   reference_length = 1
//
//   [transient]
//   enabled = true
//   node = 2
//   middle_rate = 2
//
//   [policy]
//   increase = additive 1        # or: multiplicative 1.25
//   decrease = multiplicative 0.875
//   rounding = round             # or: trunc
//   cutoff = 0.5
//   ... (see serialize_config for the full key set)
//
// parse_config validates every invariant and reports errors with the
// offending line number. Throws ConfigError.
sim::SimConfig parse_config(const std::string& text);
sim::SimConfig parse_config_file(const std::string& path);

// Emits a document that parse_config reads back into an equivalent config
// (the run seed is a command-line concern and is not serialized).
std::string serialize_config(const sim::SimConfig& config);

}  // namespace kneesim::harness
