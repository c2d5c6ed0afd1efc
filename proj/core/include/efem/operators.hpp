// Monotone elliptic operators A(t): the linear diffusion -Delta + alpha id
// and the regularized p-Laplace
//
//   <A(t)u, v> = int alpha u|u|^{p-2} v
//              + (|grad u|^2 + eps^2)^{(p-2)/2} grad u . grad v
//
// over the pushed geometry, with the Newton Jacobian assembled alongside.
#pragma once

#include "efem/evolving_mesh.hpp"

namespace efem {

enum class OperatorKind { LinearDiffusion, PLaplace };

struct OperatorSpec {
  OperatorKind kind = OperatorKind::LinearDiffusion;
  double p = 2.0;         // exponent, > 1
  double alpha = 0.0;     // zeroth-order weight, >= 0
  double epsilon = 1e-8;  // gradient regularization (p-Laplace), >= 0

  void validate() const;

  // Documented coercivity constants (C_c, c_c) for
  //   <A u, u> >= C_c |u|_X^p - c_c,
  // where |.|_X is the gradient norm on zero-boundary spaces and the full
  // W^{1,p} norm on closed curves (domain_measure = |M(t)| sup over time).
  std::pair<double, double> coercivity_constants(bool zero_boundary,
                                                 double domain_measure) const;
};

// Residual vector A(t;U)_j over the full node set (rows for boundary nodes
// included; callers restrict). Throws on non-finite results.
template <int d>
Vector nonlinear_residual(const OperatorSpec& op, const EvolvingMesh<d>& mesh,
                          double t, const Vector& full_u);

// Derivative dA/dU, same layout.
template <int d>
Matrix nonlinear_jacobian(const OperatorSpec& op, const EvolvingMesh<d>& mesh,
                          double t, const Vector& full_u);

// Frozen-coefficient linearization P with P(u) u = A(u): gradient weight and
// zeroth-order weight evaluated at the given iterate. Used as the Picard
// fallback operator when a damped Newton step fails to reduce the residual.
template <int d>
Matrix picard_matrix(const OperatorSpec& op, const EvolvingMesh<d>& mesh,
                     double t, const Vector& full_u);

// |u|_X^p entering the energy accounting: gradient-only on zero-boundary
// spaces, |u|^p + |grad u|^p otherwise.
template <int d>
double xnorm_p(const OperatorSpec& op, const EvolvingMesh<d>& mesh, double t,
               const Vector& full_u, bool zero_boundary);

}  // namespace efem
