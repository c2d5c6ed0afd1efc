#include "efem/spaces.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "efem/errors.hpp"

namespace efem {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reference chord forms (t = 0 geometry is exact).
template <int d>
Matrix reference_mass(const EvolvingMesh<d>& mesh) {
  return assemble_mass(mesh, 0.0);
}
template <int d>
Matrix reference_stiffness(const EvolvingMesh<d>& mesh) {
  return assemble_stiffness(mesh, 0.0);
}

template <int d>
std::vector<int> interior(const EvolvingMesh<d>& mesh) {
  return mesh.reference().interior_nodes();
}

// --- DualFlowL1 reparametrization R_t = Phi_0^t o ~Phi_t^0 in the curve
// parameter: per reference node, the angle theta_j(t) of R_t(p_j) and its
// exact rate theta_dot_j = grad(theta) . dR/dt, where
// dR/dt = (DPhi_t^0)^{-1} (w~ - w) evaluated on the common pushed curve.
struct ReparamData {
  std::vector<double> theta;
  std::vector<double> theta_dot;
};

ReparamData dual_reparam(const EvolvingMesh<2>& mesh, const FlowMap<2>& dual,
                         double t) {
  const auto& ref = mesh.reference();
  const auto& flow = mesh.flow();
  ReparamData rd;
  const int n = ref.n_nodes();
  rd.theta.resize(n);
  rd.theta_dot.resize(n);
  for (int j = 0; j < n; ++j) {
    const Vec<2> y = dual.state(ref.nodes[j], t).x;
    const Vec<2> q = flow.inverse(y, t);
    const FlowState<2> s = flow.state(q, t);
    const Vec<2> wdiff = dual.field().eval(t, y) - flow.field().eval(t, y);
    const Vec<2> rdot = s.jac.inverse() * wdiff;
    rd.theta[j] = std::atan2(q.y(), q.x());
    rd.theta_dot[j] = (-q.y() * rdot.x() + q.x() * rdot.y()) / q.squaredNorm();
  }
  return rd;
}

// Periodic linear interpolation in the angle parameter on the uniform
// reference circle: returns (cell, fraction).
std::pair<int, double> locate_angle(double theta, int n) {
  const double dtheta = kTwoPi / n;
  double s = std::fmod(theta, kTwoPi);
  if (s < 0.0) s += kTwoPi;
  int cell = static_cast<int>(std::floor(s / dtheta));
  if (cell >= n) cell = n - 1;
  double frac = s / dtheta - cell;
  if (frac < 0.0) frac = 0.0;
  if (frac > 1.0) frac = 1.0;
  return {cell, frac};
}

template <int d>
void require_dual(const PivotSpec<d>& pivot, const EvolvingMesh<d>& mesh) {
  if (mesh.reference().topology != Topology::ClosedCurve)
    throw std::invalid_argument("DualFlowL1 requires closed-curve topology");
  if (pivot.dual_flow == nullptr)
    throw std::invalid_argument("DualFlowL1 requires a second flow");
}

template <int d>
void require_hminus1(const EvolvingMesh<d>& mesh) {
  if (mesh.reference().topology != Topology::IntervalWithBoundary)
    throw std::invalid_argument(
        "Hminus1 pivot is unsupported on closed curves (singular stiffness)");
}

}  // namespace

std::string pivot_name(Pivot p) {
  switch (p) {
    case Pivot::L2:
      return "L2";
    case Pivot::H1:
      return "H1";
    case Pivot::Hminus1:
      return "Hminus1";
    case Pivot::DualFlowL1:
      return "DualFlowL1";
  }
  return "?";
}

double dual_pair_normal_mismatch(const EvolvingMesh<2>& mesh,
                                 const FlowMap<2>& dual, double t) {
  const auto g = mesh.geometry(t);
  double worst = 0.0;
  for (const auto& x : g.position) {
    const Vec<2> nu = x.normalized();  // radial normal (circle catalog)
    const Vec<2> wdiff =
        mesh.flow().field().eval(t, x) - dual.field().eval(t, x);
    worst = std::max(worst, std::abs(wdiff.dot(nu)));
  }
  return worst;
}

// ---------------------------------------------------------------------------

template <int d>
double PushedFunction<d>::operator()(const Vec<d>& x) const {
  const auto& ref = mesh_->reference();
  const Vec<d> p = mesh_->flow().inverse(x, t_);
  if constexpr (d == 1) {
    const double a = ref.node_parameter.front();
    const double b = ref.node_parameter.back();
    const double tol = 1e-9 * (b - a);
    if (p(0) < a - tol || p(0) > b + tol)
      throw std::domain_error("point outside the evolved domain");
    const double s = std::clamp(p(0), a, b);
    const double h = (b - a) / ref.n_elements();
    const int e =
        std::min(static_cast<int>((s - a) / h), ref.n_elements() - 1);
    const auto [i, j] = ref.elements[e];
    const double q = (s - ref.node_parameter[i]) /
                     (ref.node_parameter[j] - ref.node_parameter[i]);
    return (1.0 - q) * coeffs_[i] + q * coeffs_[j];
  } else {
    const auto [cell, frac] =
        locate_angle(std::atan2(p.y(), p.x()), ref.n_nodes());
    const auto [i, j] = ref.elements[cell];
    return (1.0 - frac) * coeffs_[i] + frac * coeffs_[j];
  }
}

template <int d>
PushedFunction<d> pushforward(const EvolvingMesh<d>& mesh, const FeFunction& u,
                              double t) {
  return PushedFunction<d>(&mesh, to_full(mesh.reference(), u), t);
}

template <int d>
FeFunction pullback(const EvolvingMesh<d>& mesh, const PushedFunction<d>& u,
                    double /*t*/, SpaceTag tag) {
  return from_full(mesh.reference(), u.coefficients(), tag);
}

// ---------------------------------------------------------------------------

template <int d>
TransportedForms<d> transported_forms(const EvolvingMesh<d>& mesh, double t) {
  const auto& ref = mesh.reference();
  const auto qd = mesh.quad_data(t);
  const int nn = ref.n_nodes();
  TransportedForms<d> F;
  F.mass_J = Matrix::Zero(nn, nn);
  F.mass_Jdiv = Matrix::Zero(nn, nn);
  F.stiff_B = Matrix::Zero(nn, nn);
  F.stiff_Bdot = Matrix::Zero(nn, nn);
  for (int e = 0; e < ref.n_elements(); ++e) {
    const auto [i, j] = ref.elements[e];
    const int idx[2] = {i, j};
    const double L0 = ref.element_length(e);
    double wj[GaussRule3::n], wjd[GaussRule3::n];
    double b = 0.0, bdot = 0.0;
    for (int q = 0; q < GaussRule3::n; ++q) {
      const auto& s = qd[e][q];
      wj[q] = s.stretch;
      wjd[q] = s.stretch * s.divg;
      b += GaussRule3::weights[q] / s.stretch;
      bdot += GaussRule3::weights[q] * (-s.divg / s.stretch);
    }
    const double sgn[2] = {-1.0, 1.0};
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) {
        double mj = 0.0, mjd = 0.0;
        for (int q = 0; q < GaussRule3::n; ++q) {
          const double qq = GaussRule3::points[q];
          const double ha = (a == 0) ? 1.0 - qq : qq;
          const double hc = (c == 0) ? 1.0 - qq : qq;
          mj += GaussRule3::weights[q] * ha * hc * wj[q];
          mjd += GaussRule3::weights[q] * ha * hc * wjd[q];
        }
        F.mass_J(idx[a], idx[c]) += L0 * mj;
        F.mass_Jdiv(idx[a], idx[c]) += L0 * mjd;
        F.stiff_B(idx[a], idx[c]) += sgn[a] * sgn[c] * b / L0;
        F.stiff_Bdot(idx[a], idx[c]) += sgn[a] * sgn[c] * bdot / L0;
      }
  }
  return F;
}

template <int d>
double reference_pairing(const PivotSpec<d>& pivot,
                         const EvolvingMesh<d>& mesh, double t,
                         const Vector& u0, const Vector& v0) {
  switch (pivot.variant) {
    case Pivot::L2: {
      const auto F = transported_forms(mesh, t);
      return u0.dot(F.mass_J * v0);
    }
    case Pivot::H1: {
      const auto F = transported_forms(mesh, t);
      return u0.dot((F.mass_J + F.stiff_B) * v0);
    }
    case Pivot::Hminus1: {
      require_hminus1(mesh);
      const auto idx = interior(mesh);
      const auto F = transported_forms(mesh, t);
      const Matrix M0 = restrict_matrix(reference_mass(mesh), idx);
      const Matrix KB = restrict_matrix(F.stiff_B, idx);
      const Vector W = solve_spd(KB, M0 * v0, true);
      return (M0 * u0).dot(W);
    }
    case Pivot::DualFlowL1: {
      require_dual(pivot, mesh);
      if constexpr (d == 2) {
        const auto rd = dual_reparam(mesh, *pivot.dual_flow, t);
        const Matrix M0 = reference_mass(mesh);
        const Vector mv = M0 * v0;
        const int n = mesh.reference().n_nodes();
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
          const auto [cell, frac] = locate_angle(rd.theta[j], n);
          const auto [a, b] = mesh.reference().elements[cell];
          acc += mv[j] * ((1.0 - frac) * u0[a] + frac * u0[b]);
        }
        return acc;
      }
      break;
    }
  }
  throw std::logic_error("unreachable pivot");
}

template <int d>
double lambda_form_transported(const PivotSpec<d>& pivot,
                               const EvolvingMesh<d>& mesh, double t,
                               const Vector& u0, const Vector& v0) {
  switch (pivot.variant) {
    case Pivot::L2: {
      const auto F = transported_forms(mesh, t);
      return u0.dot(F.mass_Jdiv * v0);
    }
    case Pivot::H1: {
      const auto F = transported_forms(mesh, t);
      return u0.dot((F.mass_Jdiv + F.stiff_Bdot) * v0);
    }
    case Pivot::Hminus1: {
      require_hminus1(mesh);
      const auto idx = interior(mesh);
      const auto F = transported_forms(mesh, t);
      const Matrix M0 = restrict_matrix(reference_mass(mesh), idx);
      const Matrix KB = restrict_matrix(F.stiff_B, idx);
      const Matrix KBdot = restrict_matrix(F.stiff_Bdot, idx);
      const Vector Wu = solve_spd(KB, M0 * u0, true);
      const Vector Wv = solve_spd(KB, M0 * v0, true);
      return -Wu.dot(KBdot * Wv);
    }
    case Pivot::DualFlowL1: {
      require_dual(pivot, mesh);
      if constexpr (d == 2) {
        const auto rd = dual_reparam(mesh, *pivot.dual_flow, t);
        const Matrix M0 = reference_mass(mesh);
        const Vector mv = M0 * v0;
        const int n = mesh.reference().n_nodes();
        const double dtheta = kTwoPi / n;
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
          const auto [cell, frac] = locate_angle(rd.theta[j], n);
          (void)frac;
          const auto [a, b] = mesh.reference().elements[cell];
          const double slope = (u0[b] - u0[a]) / dtheta;
          acc += mv[j] * slope * rd.theta_dot[j];
        }
        return acc;
      }
      break;
    }
  }
  throw std::logic_error("unreachable pivot");
}

template <int d>
double lambda_form(const PivotSpec<d>& pivot, const EvolvingMesh<d>& mesh,
                   double t, const Vector& u, const Vector& v) {
  if (pivot.variant != Pivot::Hminus1)
    return lambda_form_transported(pivot, mesh, t, u, v);
  require_hminus1(mesh);
  const auto idx = interior(mesh);
  const auto F = transported_forms(mesh, t);
  const Matrix MJ = restrict_matrix(F.mass_J, idx);
  const Matrix KB = restrict_matrix(F.stiff_B, idx);
  const Matrix KBdot = restrict_matrix(F.stiff_Bdot, idx);
  const Vector Wu = solve_spd(KB, MJ * u, true);
  const Vector Wv = solve_spd(KB, MJ * v, true);
  return -Wu.dot(KBdot * Wv);
}

// ---------------------------------------------------------------------------

template <int d>
PiOperator pi_matrix(const PivotSpec<d>& pivot, const EvolvingMesh<d>& mesh,
                     double t) {
  PiOperator op;
  op.time = t;
  op.pivot = pivot.variant;
  switch (pivot.variant) {
    case Pivot::L2: {
      const auto F = transported_forms(mesh, t);
      const Matrix M0 = reference_mass(mesh);
      op.forward = Eigen::LLT<Matrix>(M0).solve(F.mass_J);
      op.inverse = Eigen::LLT<Matrix>(F.mass_J).solve(M0);
      return op;
    }
    case Pivot::H1: {
      const auto F = transported_forms(mesh, t);
      const Matrix G0 = reference_mass(mesh) + reference_stiffness(mesh);
      const Matrix Gt = F.mass_J + F.stiff_B;
      op.forward = Eigen::LLT<Matrix>(G0).solve(Gt);
      op.inverse = Eigen::LLT<Matrix>(Gt).solve(G0);
      return op;
    }
    case Pivot::Hminus1: {
      require_hminus1(mesh);
      const auto idx = interior(mesh);
      const auto F = transported_forms(mesh, t);
      const Matrix M0 = restrict_matrix(reference_mass(mesh), idx);
      const Matrix K0 = restrict_matrix(reference_stiffness(mesh), idx);
      const Matrix KB = restrict_matrix(F.stiff_B, idx);
      // Pi = M0^{-1} K0 KB^{-1} M0; the inverse swaps K0 and KB.
      const Matrix T = Eigen::LLT<Matrix>(KB).solve(M0);
      op.forward = Eigen::LLT<Matrix>(M0).solve(K0 * T);
      const Matrix S = Eigen::LLT<Matrix>(K0).solve(M0);
      op.inverse = Eigen::LLT<Matrix>(M0).solve(KB * S);
      return op;
    }
    case Pivot::DualFlowL1: {
      require_dual(pivot, mesh);
      if constexpr (d == 2) {
        const auto rd = dual_reparam(mesh, *pivot.dual_flow, t);
        const int n = mesh.reference().n_nodes();
        Matrix I = Matrix::Zero(n, n);
        for (int j = 0; j < n; ++j) {
          const auto [cell, frac] = locate_angle(rd.theta[j], n);
          const auto [a, b] = mesh.reference().elements[cell];
          I(j, a) += 1.0 - frac;
          I(j, b) += frac;
        }
        op.forward = I;
        op.inverse = Eigen::PartialPivLU<Matrix>(I).inverse();
        return op;
      }
      break;
    }
  }
  throw std::logic_error("unreachable pivot");
}

template <int d>
double reference_pivot_pairing(const PivotSpec<d>& pivot,
                               const EvolvingMesh<d>& mesh, const Vector& a,
                               const Vector& b) {
  switch (pivot.variant) {
    case Pivot::L2:
    case Pivot::DualFlowL1:
      return a.dot(reference_mass(mesh) * b);
    case Pivot::H1:
      return a.dot((reference_mass(mesh) + reference_stiffness(mesh)) * b);
    case Pivot::Hminus1: {
      const auto idx = interior(mesh);
      const Matrix M0 = restrict_matrix(reference_mass(mesh), idx);
      const Matrix K0 = restrict_matrix(reference_stiffness(mesh), idx);
      const Vector W = solve_spd(K0, M0 * b, true);
      return (M0 * a).dot(W);
    }
  }
  throw std::logic_error("unreachable pivot");
}

// ---------------------------------------------------------------------------

template <int d>
double hminus1_inner(const EvolvingMesh<d>& mesh, double t,
                     const Vector& f_interior, const Vector& g_interior) {
  require_hminus1(mesh);
  const auto idx = interior(mesh);
  const Matrix M = restrict_matrix(assemble_mass(mesh, t), idx);
  const Matrix K = restrict_matrix(assemble_stiffness(mesh, t), idx);
  // (Mf)^T K^{-1} (Mg) through the factorization K = P^T L D L^T P, so the
  // value is symmetric in (f,g) down to the last bit.
  Eigen::LDLT<Matrix> ldlt(K);
  if (ldlt.info() != Eigen::Success)
    throw AssemblyError("singular stiffness in the dual inner product");
  const Vector x = ldlt.matrixL().solve(ldlt.transpositionsP() *
                                        (M * f_interior));
  const Vector y = ldlt.matrixL().solve(ldlt.transpositionsP() *
                                        (M * g_interior));
  const Vector dvec = ldlt.vectorD();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += x[i] * y[i] / dvec[i];
  return acc;
}

// ---------------------------------------------------------------------------

namespace {

template <int d>
double space_norm(const EvolvingMesh<d>& mesh, double t, NormTag norm,
                  const Vector& full, double r) {
  switch (norm) {
    case NormTag::L2: {
      const Matrix M = assemble_mass(mesh, t);
      return std::sqrt(full.dot(M * full));
    }
    case NormTag::H1: {
      const Matrix G = assemble_mass(mesh, t) + assemble_stiffness(mesh, t);
      return std::sqrt(full.dot(G * full));
    }
    case NormTag::W1r:
      return w1r_norm(mesh, t, full, r);
    case NormTag::Hminus1: {
      const auto idx = interior(mesh);
      const Vector fi = restrict_vector(full, idx);
      return std::sqrt(hminus1_inner(mesh, t, fi, fi));
    }
  }
  throw std::logic_error("unreachable norm");
}

}  // namespace

template <int d>
CompatibilityReport compatibility_report(const EvolvingMesh<d>& mesh,
                                         NormTag norm,
                                         const std::vector<double>& grid,
                                         double r, int n_random,
                                         std::uint64_t seed) {
  const int nn = mesh.reference().n_nodes();
  std::vector<Vector> samples;
  for (int j = 0; j < nn; ++j) {
    Vector e = Vector::Zero(nn);
    e[j] = 1.0;
    samples.push_back(std::move(e));
  }
  Lcg rng(seed);
  for (int k = 0; k < n_random; ++k) {
    Vector v(nn);
    for (int j = 0; j < nn; ++j) v[j] = rng.uniform(-1.0, 1.0);
    samples.push_back(std::move(v));
  }
  if (norm == NormTag::Hminus1) {
    for (auto& v : samples)
      for (int b : mesh.reference().boundary) v[b] = 0.0;
  }

  CompatibilityReport rep;
  rep.max_ratio = 0.0;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  double horizon = 0.0;
  for (double t : grid) horizon = std::max(horizon, t);
  const double exponent = (norm == NormTag::Hminus1) ? 1.5 : 1.0;
  rep.gronwall_bound =
      std::exp(exponent * mesh.flow().field().divergence_sup * horizon);
  for (const auto& v : samples) {
    const double n0 = space_norm(mesh, 0.0, norm, v, r);
    if (n0 == 0.0) continue;
    for (double t : grid) {
      const double ratio = space_norm(mesh, t, norm, v, r) / n0;
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      rep.min_ratio = std::min(rep.min_ratio, ratio);
    }
  }
  return rep;
}

template <int d>
std::pair<double, double> pi_operator_norms(const PivotSpec<d>& pivot,
                                            const EvolvingMesh<d>& mesh,
                                            const std::vector<double>& grid) {
  double fwd = 0.0, inv = 0.0;
  for (double t : grid) {
    const PiOperator op = pi_matrix(pivot, mesh, t);
    fwd = std::max(fwd, op.forward.jacobiSvd().singularValues().maxCoeff());
    inv = std::max(inv, op.inverse.jacobiSvd().singularValues().maxCoeff());
  }
  return {fwd, inv};
}

// ---------------------------------------------------------------------------

template class PushedFunction<1>;
template class PushedFunction<2>;
template PushedFunction<1> pushforward<1>(const EvolvingMesh<1>&,
                                          const FeFunction&, double);
template PushedFunction<2> pushforward<2>(const EvolvingMesh<2>&,
                                          const FeFunction&, double);
template FeFunction pullback<1>(const EvolvingMesh<1>&,
                                const PushedFunction<1>&, double, SpaceTag);
template FeFunction pullback<2>(const EvolvingMesh<2>&,
                                const PushedFunction<2>&, double, SpaceTag);
template TransportedForms<1> transported_forms<1>(const EvolvingMesh<1>&,
                                                  double);
template TransportedForms<2> transported_forms<2>(const EvolvingMesh<2>&,
                                                  double);
template double reference_pairing<1>(const PivotSpec<1>&,
                                     const EvolvingMesh<1>&, double,
                                     const Vector&, const Vector&);
template double reference_pairing<2>(const PivotSpec<2>&,
                                     const EvolvingMesh<2>&, double,
                                     const Vector&, const Vector&);
template double lambda_form_transported<1>(const PivotSpec<1>&,
                                           const EvolvingMesh<1>&, double,
                                           const Vector&, const Vector&);
template double lambda_form_transported<2>(const PivotSpec<2>&,
                                           const EvolvingMesh<2>&, double,
                                           const Vector&, const Vector&);
template double lambda_form<1>(const PivotSpec<1>&, const EvolvingMesh<1>&,
                               double, const Vector&, const Vector&);
template double lambda_form<2>(const PivotSpec<2>&, const EvolvingMesh<2>&,
                               double, const Vector&, const Vector&);
template PiOperator pi_matrix<1>(const PivotSpec<1>&, const EvolvingMesh<1>&,
                                 double);
template PiOperator pi_matrix<2>(const PivotSpec<2>&, const EvolvingMesh<2>&,
                                 double);
template double reference_pivot_pairing<1>(const PivotSpec<1>&,
                                           const EvolvingMesh<1>&,
                                           const Vector&, const Vector&);
template double reference_pivot_pairing<2>(const PivotSpec<2>&,
                                           const EvolvingMesh<2>&,
                                           const Vector&, const Vector&);
template double hminus1_inner<1>(const EvolvingMesh<1>&, double, const Vector&,
                                 const Vector&);
template double hminus1_inner<2>(const EvolvingMesh<2>&, double, const Vector&,
                                 const Vector&);
template CompatibilityReport compatibility_report<1>(const EvolvingMesh<1>&,
                                                     NormTag,
                                                     const std::vector<double>&,
                                                     double, int,
                                                     std::uint64_t);
template CompatibilityReport compatibility_report<2>(const EvolvingMesh<2>&,
                                                     NormTag,
                                                     const std::vector<double>&,
                                                     double, int,
                                                     std::uint64_t);
template std::pair<double, double> pi_operator_norms<1>(
    const PivotSpec<1>&, const EvolvingMesh<1>&, const std::vector<double>&);
template std::pair<double, double> pi_operator_norms<2>(
    const PivotSpec<2>&, const EvolvingMesh<2>&, const std::vector<double>&);

}  // namespace efem
