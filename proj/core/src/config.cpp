#include "efem/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "efem/errors.hpp"

namespace efem {

bool Scenario::zero_boundary() const {
  if (boundary == "zero") return true;
  if (boundary == "free") return false;
  return geometry == "interval";  // auto
}

namespace {

struct Entry {
  std::string value;
  int line;
};

using Sections = std::map<std::string, std::map<std::string, Entry>>;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

Sections tokenize(const std::string& text) {
  static const char* known_sections[] = {"geometry", "flow", "problem", "run"};
  Sections sections;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (const auto hash = s.find('#'); hash != std::string::npos)
      s = trim(s.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      bool known = false;
      for (auto* k : known_sections) known |= section == k;
      if (!known) fail(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    if (section.empty()) fail(line, "key before any [section]");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) fail(line, "empty key or value");
    auto [it, inserted] = sections[section].insert({key, {value, line}});
    if (!inserted)
      fail(line, "duplicate key '" + key + "' (first at line " +
                     std::to_string(it->second.line) + ")");
  }
  return sections;
}

double parse_double(const Entry& e) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(e.line, "unparsable number '" + e.value + "'");
  }
}

long parse_int(const Entry& e) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(e.line, "unparsable integer '" + e.value + "'");
  }
}

std::vector<double> parse_list(const Entry& e) {
  std::vector<double> out;
  std::istringstream in(e.value);
  std::string tok;
  while (in >> tok) {
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      fail(e.line, "unparsable number '" + tok + "' in list");
    }
  }
  return out;
}

// Consume a key if present; leftover keys are reported as unknown.
template <typename F>
void take(std::map<std::string, Entry>& sec, const std::string& key, F&& f) {
  const auto it = sec.find(key);
  if (it == sec.end()) return;
  f(it->second);
  sec.erase(it);
}

void fill_field_params(std::map<std::string, Entry>& sec, FieldParams& fp,
                       const std::string& prefix) {
  take(sec, prefix + "speed", [&](const Entry& e) { fp.speed = parse_double(e); });
  take(sec, prefix + "rate", [&](const Entry& e) { fp.rate = parse_double(e); });
  take(sec, prefix + "amplitude",
       [&](const Entry& e) { fp.amplitude = parse_double(e); });
  take(sec, prefix + "frequency",
       [&](const Entry& e) { fp.frequency = parse_double(e); });
  take(sec, prefix + "omega", [&](const Entry& e) { fp.omega = parse_double(e); });
  take(sec, prefix + "coeffs",
       [&](const Entry& e) { fp.coefficients = parse_list(e); });
}

}  // namespace

Scenario parse_config(const std::string& text) {
  Sections sections = tokenize(text);
  Scenario sc;

  if (auto it = sections.find("geometry"); it != sections.end()) {
    auto& sec = it->second;
    take(sec, "kind", [&](const Entry& e) {
      if (e.value != "interval" && e.value != "circle")
        fail(e.line, "geometry kind must be interval or circle");
      sc.geometry = e.value;
    });
    take(sec, "a", [&](const Entry& e) { sc.a = parse_double(e); });
    take(sec, "b", [&](const Entry& e) { sc.b = parse_double(e); });
    take(sec, "radius", [&](const Entry& e) {
      sc.radius = parse_double(e);
      if (!(sc.radius > 0.0)) fail(e.line, "radius must be > 0");
    });
    take(sec, "n", [&](const Entry& e) {
      sc.n = static_cast<int>(parse_int(e));
    });
  }
  if (auto it = sections.find("flow"); it != sections.end()) {
    auto& sec = it->second;
    take(sec, "field", [&](const Entry& e) { sc.field = e.value; });
    take(sec, "tilde_field", [&](const Entry& e) { sc.tilde_field = e.value; });
    take(sec, "substeps", [&](const Entry& e) {
      sc.substeps = static_cast<int>(parse_int(e));
      if (sc.substeps < 1) fail(e.line, "substeps must be >= 1");
    });
    fill_field_params(sec, sc.field_params, "");
    fill_field_params(sec, sc.tilde_params, "tilde_");
  }
  if (auto it = sections.find("problem"); it != sections.end()) {
    auto& sec = it->second;
    take(sec, "pivot", [&](const Entry& e) {
      if (e.value == "L2")
        sc.pivot = Pivot::L2;
      else if (e.value == "H1")
        sc.pivot = Pivot::H1;
      else if (e.value == "Hminus1")
        sc.pivot = Pivot::Hminus1;
      else if (e.value == "DualFlowL1")
        sc.pivot = Pivot::DualFlowL1;
      else
        fail(e.line, "pivot must be L2 | H1 | Hminus1 | DualFlowL1");
    });
    take(sec, "operator", [&](const Entry& e) {
      if (e.value == "linear-diffusion")
        sc.op.kind = OperatorKind::LinearDiffusion;
      else if (e.value == "p-laplace")
        sc.op.kind = OperatorKind::PLaplace;
      else
        fail(e.line, "operator must be linear-diffusion | p-laplace");
    });
    take(sec, "p", [&](const Entry& e) {
      sc.op.p = parse_double(e);
      if (!(sc.op.p > 1.0)) fail(e.line, "p must be > 1");
    });
    take(sec, "alpha", [&](const Entry& e) {
      sc.op.alpha = parse_double(e);
      if (sc.op.alpha < 0.0) fail(e.line, "alpha must be >= 0");
    });
    take(sec, "epsilon", [&](const Entry& e) {
      sc.op.epsilon = parse_double(e);
      if (sc.op.epsilon < 0.0) fail(e.line, "epsilon must be >= 0");
    });
    take(sec, "forcing", [&](const Entry& e) {
      if (e.value != "zero" && e.value != "one" &&
          e.value != "manufactured-heat")
        fail(e.line, "forcing must be zero | one | manufactured-heat");
      sc.forcing = e.value;
    });
    take(sec, "initial", [&](const Entry& e) {
      if (e.value != "zero" && e.value != "one" && e.value != "sin" &&
          e.value != "hat" && e.value != "gauss")
        fail(e.line, "initial must be zero | one | sin | hat | gauss");
      sc.initial = e.value;
    });
    take(sec, "boundary", [&](const Entry& e) {
      if (e.value != "auto" && e.value != "zero" && e.value != "free")
        fail(e.line, "boundary must be auto | zero | free");
      sc.boundary = e.value;
    });
  }
  if (auto it = sections.find("run"); it != sections.end()) {
    auto& sec = it->second;
    take(sec, "T", [&](const Entry& e) {
      sc.T = parse_double(e);
      if (!(sc.T > 0.0)) fail(e.line, "T must be > 0");
    });
    take(sec, "steps", [&](const Entry& e) {
      sc.steps = static_cast<int>(parse_int(e));
      if (sc.steps < 1) fail(e.line, "steps must be >= 1");
    });
    take(sec, "newton_tol", [&](const Entry& e) {
      sc.newton_tol = parse_double(e);
      if (!(sc.newton_tol > 0.0)) fail(e.line, "newton_tol must be > 0");
    });
    take(sec, "newton_max_iter", [&](const Entry& e) {
      sc.newton_max_iter = static_cast<int>(parse_int(e));
      if (sc.newton_max_iter < 1) fail(e.line, "newton_max_iter must be >= 1");
    });
    take(sec, "out_dir", [&](const Entry& e) { sc.out_dir = e.value; });
    take(sec, "workers", [&](const Entry& e) {
      sc.workers = static_cast<int>(parse_int(e));
      if (sc.workers < 1) fail(e.line, "workers must be >= 1");
    });
    take(sec, "seed", [&](const Entry& e) {
      sc.seed = static_cast<std::uint64_t>(parse_int(e));
    });
  }

  // Anything left over is unknown.
  for (const auto& [section, keys] : sections)
    for (const auto& [key, entry] : keys)
      fail(entry.line, "unknown key '" + key + "' in [" + section + "]");

  // Cross-field validation.
  if (sc.geometry == "interval") {
    if (!(sc.a < sc.b)) throw ConfigError("geometry requires a < b");
    if (sc.n < 2) throw ConfigError("interval requires n >= 2");
  } else {
    if (sc.n < 3) throw ConfigError("circle requires n >= 3");
  }
  if (!field_exists(sc.field, sc.dim()))
    throw ConfigError("unknown velocity field '" + sc.field + "' for " +
                      sc.geometry + " geometry");
  if (!sc.tilde_field.empty() && !field_exists(sc.tilde_field, sc.dim()))
    throw ConfigError("unknown velocity field '" + sc.tilde_field + "'");
  if (sc.pivot == Pivot::DualFlowL1) {
    if (sc.geometry != "circle")
      throw ConfigError("DualFlowL1 requires circle geometry");
    if (sc.tilde_field.empty())
      throw ConfigError("DualFlowL1 requires tilde_field");
  }
  if (sc.pivot == Pivot::Hminus1 && sc.geometry != "interval")
    throw ConfigError("Hminus1 requires interval geometry");
  sc.op.validate();
  return sc;
}

Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace efem
