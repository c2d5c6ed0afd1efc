#include "efem/operators.hpp"

#include <cmath>

#include "efem/assembly.hpp"
#include "efem/errors.hpp"

namespace efem {

void OperatorSpec::validate() const {
  if (!(p > 1.0)) throw ConfigError("operator exponent requires p > 1");
  if (alpha < 0.0) throw ConfigError("zeroth-order weight requires alpha >= 0");
  if (epsilon < 0.0) throw ConfigError("regularization requires epsilon >= 0");
  if (epsilon == 0.0 && p != 2.0 && kind == OperatorKind::PLaplace)
    throw ConfigError("epsilon = 0 is permitted only when p = 2");
}

std::pair<double, double> OperatorSpec::coercivity_constants(
    bool zero_boundary, double domain_measure) const {
  const double pp = (kind == OperatorKind::LinearDiffusion) ? 2.0 : p;
  // (s^2+eps^2)^{(p-2)/2} s^2 >= s^p - eps^p pointwise, so the
  // regularization costs at most eps^p |M|.
  const double slack = std::pow(epsilon, pp) * domain_measure;
  if (zero_boundary) return {1.0, slack};
  // Full norm on closed curves needs the zeroth-order term.
  return {std::min(1.0, alpha), slack};
}

namespace {

double grad_weight(const OperatorSpec& op, double slope) {
  const double p = (op.kind == OperatorKind::LinearDiffusion) ? 2.0 : op.p;
  if (p == 2.0) return 1.0;
  const double s2 = slope * slope + op.epsilon * op.epsilon;
  return std::pow(s2, 0.5 * (p - 2.0));
}

// d/ds [ (s^2+eps^2)^{(p-2)/2} s ] = w(s) + (p-2)(s^2+eps^2)^{(p-4)/2} s^2.
double grad_weight_derivative_term(const OperatorSpec& op, double slope) {
  const double p = (op.kind == OperatorKind::LinearDiffusion) ? 2.0 : op.p;
  if (p == 2.0) return 0.0;
  const double s2 = slope * slope + op.epsilon * op.epsilon;
  return (p - 2.0) * std::pow(s2, 0.5 * (p - 4.0)) * slope * slope;
}

}  // namespace

template <int d>
Vector nonlinear_residual(const OperatorSpec& op, const EvolvingMesh<d>& mesh,
                          double t, const Vector& full_u) {
  const auto& ref = mesh.reference();
  const PushedGeometry<d> g = mesh.geometry(t);
  const double p = (op.kind == OperatorKind::LinearDiffusion) ? 2.0 : op.p;
  Vector R = Vector::Zero(ref.n_nodes());
  for (int e = 0; e < ref.n_elements(); ++e) {
    const auto [i, j] = ref.elements[e];
    const int idx[2] = {i, j};
    const double L = g.elem_len[e];
    const double slope = (full_u[j] - full_u[i]) / L;
    // Gradient term: piecewise-constant integrand, exact.
    const double flux = grad_weight(op, slope) * slope;
    R[i] += -flux;
    R[j] += flux;
    // Zeroth-order term by quadrature.
    if (op.alpha > 0.0) {
      for (int a = 0; a < 2; ++a) {
        double v = 0.0;
        for (int q = 0; q < GaussRule3::n; ++q) {
          const double qq = GaussRule3::points[q];
          const double uq = (1.0 - qq) * full_u[i] + qq * full_u[j];
          const double hat = (a == 0) ? 1.0 - qq : qq;
          // u|u|^{p-2} written as sign(u)|u|^{p-1}: finite at u = 0 for p > 1.
          const double zeroth =
              (uq >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(uq), p - 1.0);
          v += GaussRule3::weights[q] * zeroth * hat;
        }
        R[idx[a]] += op.alpha * L * v;
      }
    }
  }
  if (!R.allFinite())
    throw NewtonError("diverged state: non-finite operator residual",
                      std::numeric_limits<double>::infinity());
  return R;
}

template <int d>
Matrix nonlinear_jacobian(const OperatorSpec& op, const EvolvingMesh<d>& mesh,
                          double t, const Vector& full_u) {
  const auto& ref = mesh.reference();
  const PushedGeometry<d> g = mesh.geometry(t);
  const double p = (op.kind == OperatorKind::LinearDiffusion) ? 2.0 : op.p;
  Matrix J = Matrix::Zero(ref.n_nodes(), ref.n_nodes());
  const double sgn[2] = {-1.0, 1.0};
  for (int e = 0; e < ref.n_elements(); ++e) {
    const auto [i, j] = ref.elements[e];
    const int idx[2] = {i, j};
    const double L = g.elem_len[e];
    const double slope = (full_u[j] - full_u[i]) / L;
    const double w =
        grad_weight(op, slope) + grad_weight_derivative_term(op, slope);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        J(idx[a], idx[b]) += sgn[a] * sgn[b] * w / L;
    if (op.alpha > 0.0) {
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          double v = 0.0;
          for (int q = 0; q < GaussRule3::n; ++q) {
            const double qq = GaussRule3::points[q];
            const double uq = (1.0 - qq) * full_u[i] + qq * full_u[j];
            const double ha = (a == 0) ? 1.0 - qq : qq;
            const double hb = (b == 0) ? 1.0 - qq : qq;
            // |u|^{p-2} blows up at u = 0 for p < 2; clamp in the Jacobian
            // only (the damped iteration tolerates the inexact derivative).
            const double base = std::max(std::abs(uq), 1e-12);
            v += GaussRule3::weights[q] * (p - 1.0) *
                 std::pow(base, p - 2.0) * ha * hb;
          }
          J(idx[a], idx[b]) += op.alpha * L * v;
        }
    }
  }
  return J;
}

template <int d>
Matrix picard_matrix(const OperatorSpec& op, const EvolvingMesh<d>& mesh,
                     double t, const Vector& full_u) {
  const auto& ref = mesh.reference();
  const PushedGeometry<d> g = mesh.geometry(t);
  const double p = (op.kind == OperatorKind::LinearDiffusion) ? 2.0 : op.p;
  Matrix P = Matrix::Zero(ref.n_nodes(), ref.n_nodes());
  const double sgn[2] = {-1.0, 1.0};
  for (int e = 0; e < ref.n_elements(); ++e) {
    const auto [i, j] = ref.elements[e];
    const int idx[2] = {i, j};
    const double L = g.elem_len[e];
    const double slope = (full_u[j] - full_u[i]) / L;
    const double w = grad_weight(op, slope);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        P(idx[a], idx[b]) += sgn[a] * sgn[b] * w / L;
    if (op.alpha > 0.0) {
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          double v = 0.0;
          for (int q = 0; q < GaussRule3::n; ++q) {
            const double qq = GaussRule3::points[q];
            const double uq = (1.0 - qq) * full_u[i] + qq * full_u[j];
            const double ha = (a == 0) ? 1.0 - qq : qq;
            const double hb = (b == 0) ? 1.0 - qq : qq;
            v += GaussRule3::weights[q] *
                 std::pow(std::max(std::abs(uq), 1e-12), p - 2.0) * ha * hb;
          }
          P(idx[a], idx[b]) += op.alpha * L * v;
        }
    }
  }
  return P;
}

template <int d>
double xnorm_p(const OperatorSpec& op, const EvolvingMesh<d>& mesh, double t,
               const Vector& full_u, bool zero_boundary) {
  const double p = (op.kind == OperatorKind::LinearDiffusion) ? 2.0 : op.p;
  const double norm = w1r_norm(mesh, t, full_u, p, zero_boundary);
  return std::pow(norm, p);
}

template Vector nonlinear_residual<1>(const OperatorSpec&,
                                      const EvolvingMesh<1>&, double,
                                      const Vector&);
template Vector nonlinear_residual<2>(const OperatorSpec&,
                                      const EvolvingMesh<2>&, double,
                                      const Vector&);
template Matrix nonlinear_jacobian<1>(const OperatorSpec&,
                                      const EvolvingMesh<1>&, double,
                                      const Vector&);
template Matrix nonlinear_jacobian<2>(const OperatorSpec&,
                                      const EvolvingMesh<2>&, double,
                                      const Vector&);
template Matrix picard_matrix<1>(const OperatorSpec&, const EvolvingMesh<1>&,
                                 double, const Vector&);
template Matrix picard_matrix<2>(const OperatorSpec&, const EvolvingMesh<2>&,
                                 double, const Vector&);
template double xnorm_p<1>(const OperatorSpec&, const EvolvingMesh<1>&, double,
                           const Vector&, bool);
template double xnorm_p<2>(const OperatorSpec&, const EvolvingMesh<2>&, double,
                           const Vector&, bool);

}  // namespace efem
