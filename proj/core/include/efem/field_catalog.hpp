// Named catalog of velocity fields selectable from scenario files.
//
//   zero                         w = 0
//   translation (speed)          w = c          (rigid, divergence-free)
//   dilation (rate)              w = a x
//   radial-circle (amp, freq)    w = g(t) x,  g = a f cos(f t)/(1 + a sin(f t))
//                                radius R(t) = R0 (1 + a sin(f t))
//   rotating-circle (rate,omega) w = a x + om J x   (expanding + rotating)
//   user-polynomial (coeffs)     w(t,x) = sum_k c_k x^k        (1-D only)
//
// The 2-D variants of translation/dilation/zero are rigid or conformal and
// keep concentric circles concentric, so their tangential divergence is a
// function of t alone.
#pragma once

#include <vector>

#include "efem/velocity_field.hpp"

namespace efem {

struct FieldParams {
  double speed = 1.0;       // translation
  double rate = 0.1;        // dilation / rotating-circle radial rate
  double amplitude = 0.2;   // radial-circle
  double frequency = 1.0;   // radial-circle
  double omega = 0.5;       // rotating-circle
  std::vector<double> coefficients;  // user-polynomial
};

// Throws ConfigError for unknown names or parameters outside documented
// ranges (e.g. |amplitude| >= 1, which would collapse the radial circle).
template <int d>
VelocityField<d> make_field(const std::string& name, const FieldParams& params,
                            double horizon);

bool field_exists(const std::string& name, int dim);

}  // namespace efem
