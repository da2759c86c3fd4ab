#include "kneesim/config_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "kneesim/errors.hpp"

namespace kneesim::harness {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

double parse_num(const std::string& t, int line, const std::string& key) {
  if (t == "inf") return sim::kInfiniteRate;
  try {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (...) {
    throw ConfigError(line, "expected a number for '" + key + "', got '" + t +
                                "'");
  }
}

long parse_int(const std::string& t, int line, const std::string& key) {
  try {
    std::size_t used = 0;
    long v = std::stol(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (...) {
    throw ConfigError(line, "expected an integer for '" + key + "', got '" +
                                t + "'");
  }
}

std::string fmt(double v) {
  if (v == sim::kInfiniteRate) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct UserLine {
  sim::UserSpec spec;
  bool explicit_id = false;
  int line = 0;
};

}  // namespace

sim::SimConfig parse_config(const std::string& text) {
  sim::SimConfig cfg;
  cfg.path.clear();
  cfg.users.clear();
  std::vector<UserLine> users;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto hash = s.find('#'); hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "unterminated section header");
      section = s.substr(1, s.size() - 2);
      if (section != "path" && section != "users" && section != "workload" &&
          section != "transient" && section != "policy")
        throw ConfigError(line, "unknown section [" + section + "]");
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    std::vector<std::string> tok = tokens(value);
    if (section.empty())
      throw ConfigError(line, "'" + key + "' appears before any section");

    if (section == "path") {
      if (key != "node") throw ConfigError(line, "unknown key '" + key + "' in [path]");
      sim::PathNode node{static_cast<int>(cfg.path.size()), 0.0, 0.0};
      bool have_rate = false;
      for (std::size_t i = 0; i < tok.size(); i += 2) {
        if (i + 1 >= tok.size())
          throw ConfigError(line, "node attribute '" + tok[i] + "' needs a value");
        if (tok[i] == "rate") {
          node.service_rate = parse_num(tok[i + 1], line, "rate");
          have_rate = true;
        } else if (tok[i] == "prop") {
          node.propagation_delay = parse_num(tok[i + 1], line, "prop");
        } else {
          throw ConfigError(line, "unknown node attribute '" + tok[i] + "'");
        }
      }
      if (!have_rate) throw ConfigError(line, "node needs 'rate <r>'");
      if (!(node.service_rate > 0.0))
        throw ConfigError(line, "rate must be > 0");
      if (node.propagation_delay < 0.0)
        throw ConfigError(line, "prop must be >= 0");
      cfg.path.push_back(node);
    } else if (section == "users") {
      if (key != "user") throw ConfigError(line, "unknown key '" + key + "' in [users]");
      UserLine u;
      u.line = line;
      u.spec.user_id = static_cast<int>(users.size());
      for (std::size_t i = 0; i < tok.size();) {
        const std::string& attr = tok[i];
        auto need = [&](int n) {
          if (i + n >= tok.size())
            throw ConfigError(line, "user attribute '" + attr + "' needs " +
                                        std::to_string(n) + " value(s)");
        };
        if (attr == "id") {
          need(1);
          u.spec.user_id = static_cast<int>(parse_int(tok[i + 1], line, "id"));
          u.explicit_id = true;
          i += 2;
        } else if (attr == "packets") {
          need(1);
          u.spec.total_packets = parse_int(tok[i + 1], line, "packets");
          i += 2;
        } else if (attr == "wmax") {
          need(1);
          u.spec.w_max = static_cast<int>(parse_int(tok[i + 1], line, "wmax"));
          i += 2;
        } else if (attr == "start") {
          need(1);
          if (tok[i + 1] == "time0") {
            u.spec.start = {};
            i += 2;
          } else if (tok[i + 1] == "after") {
            need(3);
            u.spec.start.predecessor =
                static_cast<int>(parse_int(tok[i + 2], line, "start after"));
            u.spec.start.fraction = parse_num(tok[i + 3], line, "start after");
            i += 4;
          } else {
            throw ConfigError(line, "start must be 'time0' or 'after <id> <frac>'");
          }
        } else if (attr == "source_rate") {
          need(1);
          u.spec.source_rate = parse_num(tok[i + 1], line, "source_rate");
          i += 2;
        } else if (attr == "initial_window") {
          need(1);
          u.spec.initial_window = parse_num(tok[i + 1], line, "initial_window");
          i += 2;
        } else {
          throw ConfigError(line, "unknown user attribute '" + attr + "'");
        }
      }
      users.push_back(u);
    } else if (section == "workload") {
      if (key == "length") {
        if (tok.empty()) throw ConfigError(line, "length needs a distribution");
        sim::PacketLengthModel m;
        const std::string& kind = tok[0];
        auto need = [&](std::size_t n) {
          if (tok.size() != n + 1)
            throw ConfigError(line, "length " + kind + " takes " +
                                        std::to_string(n) + " parameter(s)");
        };
        if (kind == "constant") {
          need(1);
          m.kind = sim::LengthKind::constant;
          m.length = parse_num(tok[1], line, "length");
        } else if (kind == "uniform") {
          need(2);
          m.kind = sim::LengthKind::uniform;
          m.lo = parse_num(tok[1], line, "length");
          m.hi = parse_num(tok[2], line, "length");
        } else if (kind == "exponential") {
          need(1);
          m.kind = sim::LengthKind::exponential;
          m.mean = parse_num(tok[1], line, "length");
        } else if (kind == "bimodal") {
          need(3);
          m.kind = sim::LengthKind::bimodal;
          m.l1 = parse_num(tok[1], line, "length");
          m.l2 = parse_num(tok[2], line, "length");
          m.p1 = parse_num(tok[3], line, "length");
        } else if (kind == "erlang") {
          need(2);
          m.kind = sim::LengthKind::erlang;
          m.mean = parse_num(tok[1], line, "length");
          m.shape = static_cast<int>(parse_int(tok[2], line, "length"));
        } else {
          throw ConfigError(line, "unknown length distribution '" + kind + "'");
        }
        try {
          m.validate();
        } catch (const ConfigError& e) {
          throw ConfigError(line, e.what());
        }
        cfg.length_model = m;
      } else if (key == "reference_length") {
        cfg.reference_length = parse_num(value, line, key);
        if (!(cfg.reference_length > 0.0))
          throw ConfigError(line, "reference_length must be > 0");
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [workload]");
      }
    } else if (section == "transient") {
      if (key == "enabled") {
        if (value != "true" && value != "false")
          throw ConfigError(line, "enabled must be true or false");
        cfg.transient.enabled = value == "true";
      } else if (key == "node") {
        cfg.transient.target_node = static_cast<int>(parse_int(value, line, key));
      } else if (key == "middle_rate") {
        cfg.transient.middle_rate = parse_num(value, line, key);
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [transient]");
      }
    } else if (section == "policy") {
      auto& pol = cfg.policy;
      auto step_kind = [&](const std::string& t) {
        if (t == "additive") return policy::StepKind::additive;
        if (t == "multiplicative") return policy::StepKind::multiplicative;
        throw ConfigError(line, "expected 'additive' or 'multiplicative'");
      };
      if (key == "increase") {
        if (tok.size() != 2)
          throw ConfigError(line, "increase takes '<kind> <amount>'");
        pol.params.increase_kind = step_kind(tok[0]);
        double v = parse_num(tok[1], line, key);
        (pol.params.increase_kind == policy::StepKind::additive ? pol.params.k1
                                                                : pol.params.r1) = v;
      } else if (key == "decrease") {
        if (tok.size() != 2)
          throw ConfigError(line, "decrease takes '<kind> <amount>'");
        pol.params.decrease_kind = step_kind(tok[0]);
        double v = parse_num(tok[1], line, key);
        (pol.params.decrease_kind == policy::StepKind::additive ? pol.params.k2
                                                                : pol.params.r2) = v;
      } else if (key == "rounding") {
        if (value == "round")
          pol.params.rounding = policy::Rounding::round_half_up;
        else if (value == "trunc")
          pol.params.rounding = policy::Rounding::truncate;
        else
          throw ConfigError(line, "rounding must be 'round' or 'trunc'");
      } else if (key == "cutoff") {
        pol.cutoff = parse_num(value, line, key);
      } else if (key == "signal_weight_base") {
        pol.signal_weight_base = parse_num(value, line, key);
      } else if (key == "birth") {
        if (value == "off") {
          pol.params.birth.active = false;
        } else {
          pol.params.birth.active = true;
          pol.params.birth.initial_k1 = parse_num(value, line, key);
        }
      } else if (key == "kary") {
        if (value == "off") {
          pol.params.kary.enabled = false;
        } else {
          pol.params.kary.enabled = true;
          pol.params.kary.k = parse_num(value, line, key);
        }
      } else if (key == "detector") {
        if (value == "queue_length")
          pol.detector_metric = feedback::LoadMetric::queue_length;
        else if (value == "utilization")
          pol.detector_metric = feedback::LoadMetric::utilization;
        else
          throw ConfigError(line, "detector must be 'queue_length' or 'utilization'");
      } else if (key == "detector_gain") {
        pol.detector_gain = parse_num(value, line, key);
      } else if (key == "detector_threshold") {
        pol.detector_threshold = parse_num(value, line, key);
      } else if (key == "warmup_rtts") {
        pol.warmup_rtts = parse_num(value, line, key);
      } else if (key == "fixed_window") {
        pol.fixed_window = static_cast<int>(parse_int(value, line, key));
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [policy]");
      }
    }
  }

  // Users must form ids 0..n-1; explicit ids may arrive in any order.
  std::sort(users.begin(), users.end(),
            [](const UserLine& a, const UserLine& b) {
              return a.spec.user_id < b.spec.user_id;
            });
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (i > 0 && users[i].spec.user_id == users[i - 1].spec.user_id)
      throw ConfigError(users[i].line,
                        "duplicate user id " + std::to_string(users[i].spec.user_id));
    if (users[i].spec.user_id != static_cast<int>(i))
      throw ConfigError(users[i].line, "user ids must cover 0..n-1");
    cfg.users.push_back(users[i].spec);
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config invalid: ") + e.what());
  }
  return cfg;
}

sim::SimConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const sim::SimConfig& config) {
  std::ostringstream out;
  out << "[path]\n";
  for (const sim::PathNode& n : config.path) {
    out << "node = rate " << fmt(n.service_rate);
    if (n.propagation_delay != 0.0) out << " prop " << fmt(n.propagation_delay);
    out << "\n";
  }
  out << "\n[users]\n";
  for (const sim::UserSpec& u : config.users) {
    out << "user = id " << u.user_id << " packets " << u.total_packets
        << " wmax " << u.w_max;
    if (u.start.predecessor >= 0)
      out << " start after " << u.start.predecessor << " "
          << fmt(u.start.fraction);
    if (u.source_rate != sim::kInfiniteRate)
      out << " source_rate " << fmt(u.source_rate);
    if (u.initial_window != 1.0)
      out << " initial_window " << fmt(u.initial_window);
    out << "\n";
  }
  out << "\n[workload]\n";
  const sim::PacketLengthModel& m = config.length_model;
  out << "length = ";
  switch (m.kind) {
    case sim::LengthKind::constant: out << "constant " << fmt(m.length); break;
    case sim::LengthKind::uniform:
      out << "uniform " << fmt(m.lo) << " " << fmt(m.hi);
      break;
    case sim::LengthKind::exponential: out << "exponential " << fmt(m.mean); break;
    case sim::LengthKind::bimodal:
      out << "bimodal " << fmt(m.l1) << " " << fmt(m.l2) << " " << fmt(m.p1);
      break;
    case sim::LengthKind::erlang:
      out << "erlang " << fmt(m.mean) << " " << m.shape;
      break;
  }
  out << "\nreference_length = " << fmt(config.reference_length) << "\n";
  out << "\n[transient]\n";
  out << "enabled = " << (config.transient.enabled ? "true" : "false") << "\n";
  if (config.transient.enabled) {
    out << "node = " << config.transient.target_node << "\n";
    out << "middle_rate = " << fmt(config.transient.middle_rate) << "\n";
  }
  const sim::PolicyBundle& pol = config.policy;
  out << "\n[policy]\n";
  out << "increase = "
      << (pol.params.increase_kind == policy::StepKind::additive
              ? "additive " + fmt(pol.params.k1)
              : "multiplicative " + fmt(pol.params.r1))
      << "\n";
  out << "decrease = "
      << (pol.params.decrease_kind == policy::StepKind::additive
              ? "additive " + fmt(pol.params.k2)
              : "multiplicative " + fmt(pol.params.r2))
      << "\n";
  out << "rounding = "
      << (pol.params.rounding == policy::Rounding::truncate ? "trunc" : "round")
      << "\n";
  out << "cutoff = " << fmt(pol.cutoff) << "\n";
  out << "signal_weight_base = " << fmt(pol.signal_weight_base) << "\n";
  out << "birth = "
      << (pol.params.birth.active ? fmt(pol.params.birth.initial_k1) : "off")
      << "\n";
  out << "kary = " << (pol.params.kary.enabled ? fmt(pol.params.kary.k) : "off")
      << "\n";
  out << "detector = "
      << (pol.detector_metric == feedback::LoadMetric::queue_length
              ? "queue_length"
              : "utilization")
      << "\n";
  out << "detector_gain = " << fmt(pol.detector_gain) << "\n";
  out << "detector_threshold = " << fmt(pol.detector_threshold) << "\n";
  out << "warmup_rtts = " << fmt(pol.warmup_rtts) << "\n";
  out << "fixed_window = " << pol.fixed_window << "\n";
  return out.str();
}

}  // namespace kneesim::harness
