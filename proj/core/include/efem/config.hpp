// Scenario files: INI-style sections [geometry], [flow], [problem], [run]
// with key = value lines and '#' comments. Unknown sections/keys, duplicate
// keys, unparsable numbers and out-of-range values are rejected with line
// numbers.
#pragma once

#include <cstdint>
#include <string>

#include "efem/field_catalog.hpp"
#include "efem/operators.hpp"
#include "efem/spaces.hpp"

namespace efem {

struct Scenario {
  // [geometry]
  std::string geometry = "interval";  // interval | circle
  double a = 0.0, b = 1.0;
  double radius = 1.0;
  int n = 32;

  // [flow]
  std::string field = "zero";
  FieldParams field_params;
  std::string tilde_field;  // optional second flow (DualFlowL1)
  FieldParams tilde_params;
  int substeps = 64;

  // [problem]
  Pivot pivot = Pivot::L2;
  OperatorSpec op;
  std::string forcing = "zero";    // zero | one | manufactured-heat
  std::string initial = "sin";     // zero | one | sin | hat | gauss
  std::string boundary = "auto";   // auto | zero | free

  // [run]
  double T = 1.0;
  int steps = 100;
  double newton_tol = 1e-11;
  int newton_max_iter = 25;
  std::string out_dir = "out";  // overridable with --out
  int workers = 1;
  std::uint64_t seed = 42;

  int dim() const { return geometry == "interval" ? 1 : 2; }
  bool zero_boundary() const;
};

Scenario parse_config(const std::string& text);
Scenario load_config(const std::string& path);

}  // namespace efem
