// Velocity fields w(t,x) driving the domain motion, together with their
// spatial Jacobian Dw and (tangential) divergence. Fields are plain value
// types; all members must be deterministic for identical inputs.
#pragma once

#include <functional>
#include <string>

#include "efem/types.hpp"

namespace efem {

enum class FieldKind { Ambient1d, PlanarCurve };

// Required smoothness: continuous in t, twice continuously differentiable
// in x on the domain swept by the flow.
//
// For PlanarCurve fields `divergence` is the tangential divergence. Every
// field in the bundled catalog has the form w(t,x) = g(t) x + om J x + c(t)
// (J = 90-degree rotation), for which the tangential divergence equals g(t)
// on any curve, independently of the tangent direction.
template <int d>
struct VelocityField {
  std::function<Vec<d>(double, const Vec<d>&)> eval;
  std::function<Mat<d>(double, const Vec<d>&)> jacobian;
  std::function<double(double, const Vec<d>&)> divergence;
  FieldKind kind = d == 1 ? FieldKind::Ambient1d : FieldKind::PlanarCurve;
  std::string name = "unnamed";
  // sup over [0,T] x domain of |tangential divergence|; the Gronwall rate
  // used by the stability bound.
  double divergence_sup = 0.0;
};

}  // namespace efem
