#include "scengame/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace scengame::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string key_name(const std::string& section, const std::string& key) {
  return section + "." + key;
}

double to_double(const std::string& where, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", where, text));
  }
  return v;
}

long long to_integer(const std::string& where, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not an integer", where, text));
  }
  return v;
}

std::uint64_t to_u64(const std::string& where, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not an unsigned 64-bit integer", where, text));
  }
  return v;
}

bool to_bool(const std::string& where, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", where, text));
}

Interval to_interval(const std::string& where, const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw ConfigError(fmt::format("{}: interval '{}' must be written lo,hi", where, text));
  }
  Interval iv{to_double(where, text.substr(0, comma)),
              to_double(where, text.substr(comma + 1))};
  if (iv.lo > iv.hi) throw ConfigError(fmt::format("{}: interval has lo > hi", where));
  return iv;
}

std::vector<int> to_int_list(const std::string& where, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(static_cast<int>(to_integer(where, item)));
  }
  return out;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }
std::string interval(Interval iv) { return num(iv.lo) + "," + num(iv.hi); }

// Setter table: section -> key -> apply(value).
using Setter = std::function<void(RunConfig&, const std::string& where, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"problem",
       {
           {"kind",
            [](RunConfig& c, const std::string& w, const std::string& v) {
              const std::string t = trim(v);
              if (t == "rendezvous") {
                c.kind = ProblemKind::Rendezvous;
              } else if (t == "decoupled_quadratic") {
                c.kind = ProblemKind::DecoupledQuadratic;
              } else {
                throw ConfigError(fmt::format(
                    "{}: unknown problem '{}' (rendezvous | decoupled_quadratic)", w, t));
              }
            }},
           {"S", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.num_scenarios = static_cast<int>(to_integer(w, v));
            }},
           {"seed", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.seed = to_u64(w, v);
            }},
           {"horizon", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.rendezvous.horizon = static_cast<int>(to_integer(w, v));
            }},
           {"dt", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.rendezvous.dt = to_double(w, v);
            }},
           {"pos_range_p1", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.rendezvous.pos_range_p1 = to_interval(w, v);
            }},
           {"pos_range_p2", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.rendezvous.pos_range_p2 = to_interval(w, v);
            }},
           {"vel_range", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.rendezvous.vel_range = to_interval(w, v);
            }},
           {"p_entry_range", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.rendezvous.p_entry_range = to_interval(w, v);
            }},
           {"b_entry_range", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.rendezvous.b_entry_range = to_interval(w, v);
            }},
           {"objective_bound",
            [](RunConfig& c, const std::string& w, const std::string& v) {
              c.rendezvous.objective_bound = to_double(w, v);
            }},
           {"num_players", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.quadratic.num_players = static_cast<int>(to_integer(w, v));
            }},
           {"decision_dim", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.quadratic.decision_dim = static_cast<int>(to_integer(w, v));
            }},
           {"center_range", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.quadratic.center_range = to_interval(w, v);
            }},
       }},
      {"admm",
       {
           {"rho", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.admm.rho = to_double(w, v);
            }},
           {"tol", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.admm.tol = to_double(w, v);
            }},
           {"max_iter", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.admm.max_iter = static_cast<int>(to_integer(w, v));
            }},
           {"workers", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.admm.workers = static_cast<int>(to_integer(w, v));
            }},
           {"max_wall_seconds",
            [](RunConfig& c, const std::string& w, const std::string& v) {
              c.admm.max_wall_seconds = to_double(w, v);
            }},
           {"record_trace", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.admm.record_trace = to_bool(w, v);
            }},
           {"inner_stationarity_tol",
            [](RunConfig& c, const std::string& w, const std::string& v) {
              c.admm.inner.stationarity_tol = to_double(w, v);
            }},
           {"inner_feasibility_tol",
            [](RunConfig& c, const std::string& w, const std::string& v) {
              c.admm.inner.feasibility_tol = to_double(w, v);
            }},
           {"inner_complementarity_tol",
            [](RunConfig& c, const std::string& w, const std::string& v) {
              c.admm.inner.complementarity_tol = to_double(w, v);
            }},
           {"inner_max_iter", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.admm.inner.max_iter = static_cast<int>(to_integer(w, v));
            }},
       }},
      {"certificate",
       {
           {"eps", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.eps = to_double(w, v);
            }},
           {"eps_tilde", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.eps_tilde = to_double(w, v);
            }},
           {"D", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.objective_bound_override = to_double(w, v);
            }},
       }},
      {"output",
       {
           {"dir", [](RunConfig& c, const std::string&, const std::string& v) {
              c.output_dir = trim(v);
            }},
           {"trace_timing", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.trace_timing = to_bool(w, v);
            }},
       }},
      {"sweep",
       {
           {"s_list", [](RunConfig& c, const std::string& w, const std::string& v) {
              c.sweep_sizes = to_int_list(w, v);
            }},
           {"reference_max_s",
            [](RunConfig& c, const std::string& w, const std::string& v) {
              c.reference_max_s = static_cast<int>(to_integer(w, v));
            }},
       }},
  };
  return table;
}

}  // namespace

const char* kind_name(ProblemKind kind) {
  return kind == ProblemKind::Rendezvous ? "rendezvous" : "decoupled_quadratic";
}

void RunConfig::validate() const {
  if (num_scenarios < 1) throw ConfigError("problem.S must be at least 1");
  try {
    rendezvous.validate();
    admm.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (quadratic.num_players < 1 || quadratic.decision_dim < 1) {
    throw ConfigError("problem.num_players and problem.decision_dim must be positive");
  }
  if (admm.inner.max_iter < 1) throw ConfigError("admm.inner_max_iter must be positive");
  if (!(admm.inner.stationarity_tol > 0.0) || !(admm.inner.feasibility_tol > 0.0) ||
      !(admm.inner.complementarity_tol > 0.0)) {
    throw ConfigError("inner tolerances must be positive");
  }
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("certificate.eps must lie in (0, 1)");
  if (!(eps_tilde > 0.0)) throw ConfigError("certificate.eps_tilde must be positive");
  if (objective_bound_override < 0.0) throw ConfigError("certificate.D must be >= 0");
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
  if (sweep_sizes.empty()) throw ConfigError("sweep.s_list must not be empty");
  for (int s : sweep_sizes) {
    if (s < 1) throw ConfigError("sweep.s_list entries must be at least 1");
  }
  if (reference_max_s < 0) throw ConfigError("sweep.reference_max_s must be >= 0");
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  RunConfig c;
  const auto& table = setters();
  for (const auto& [section, body] : tree) {
    const auto sec = table.find(section);
    if (sec == table.end()) {
      if (body.empty()) {
        throw ConfigError(fmt::format("key '{}' outside of a section", section));
      }
      throw ConfigError(fmt::format("unknown config section [{}]", section));
    }
    for (const auto& [key, value] : body) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) {
        throw ConfigError(fmt::format("unknown config key '{}'", key_name(section, key)));
      }
      it->second(c, key_name(section, key), value.data());
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_ini(const RunConfig& c) {
  std::string s;
  s += "[problem]\n";
  s += fmt::format("kind = {}\n", kind_name(c.kind));
  s += fmt::format("S = {}\n", c.num_scenarios);
  s += fmt::format("seed = {}\n", c.seed);
  s += fmt::format("horizon = {}\n", c.rendezvous.horizon);
  s += fmt::format("dt = {}\n", num(c.rendezvous.dt));
  s += fmt::format("pos_range_p1 = {}\n", interval(c.rendezvous.pos_range_p1));
  s += fmt::format("pos_range_p2 = {}\n", interval(c.rendezvous.pos_range_p2));
  s += fmt::format("vel_range = {}\n", interval(c.rendezvous.vel_range));
  s += fmt::format("p_entry_range = {}\n", interval(c.rendezvous.p_entry_range));
  s += fmt::format("b_entry_range = {}\n", interval(c.rendezvous.b_entry_range));
  s += fmt::format("objective_bound = {}\n", num(c.rendezvous.objective_bound));
  s += fmt::format("num_players = {}\n", c.quadratic.num_players);
  s += fmt::format("decision_dim = {}\n", c.quadratic.decision_dim);
  s += fmt::format("center_range = {}\n", interval(c.quadratic.center_range));
  s += "\n[admm]\n";
  s += fmt::format("rho = {}\n", num(c.admm.rho));
  s += fmt::format("tol = {}\n", num(c.admm.tol));
  s += fmt::format("max_iter = {}\n", c.admm.max_iter);
  s += fmt::format("workers = {}\n", c.admm.workers);
  s += fmt::format("max_wall_seconds = {}\n", num(c.admm.max_wall_seconds));
  s += fmt::format("record_trace = {}\n", c.admm.record_trace ? "true" : "false");
  s += fmt::format("inner_stationarity_tol = {}\n", num(c.admm.inner.stationarity_tol));
  s += fmt::format("inner_feasibility_tol = {}\n", num(c.admm.inner.feasibility_tol));
  s += fmt::format("inner_complementarity_tol = {}\n",
                   num(c.admm.inner.complementarity_tol));
  s += fmt::format("inner_max_iter = {}\n", c.admm.inner.max_iter);
  s += "\n[certificate]\n";
  s += fmt::format("eps = {}\n", num(c.eps));
  s += fmt::format("eps_tilde = {}\n", num(c.eps_tilde));
  s += fmt::format("D = {}\n", num(c.objective_bound_override));
  s += "\n[output]\n";
  s += fmt::format("dir = {}\n", c.output_dir);
  s += fmt::format("trace_timing = {}\n", c.trace_timing ? "true" : "false");
  s += "\n[sweep]\n";
  std::string list;
  for (std::size_t k = 0; k < c.sweep_sizes.size(); ++k) {
    if (k) list += ",";
    list += std::to_string(c.sweep_sizes[k]);
  }
  s += fmt::format("s_list = {}\n", list);
  s += fmt::format("reference_max_s = {}\n", c.reference_max_s);
  return s;
}

}  // namespace scengame::cli
