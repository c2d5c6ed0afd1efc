// Transported function-space machinery for four pivot choices:
//
//   L2        pairing  pi(t;u,v) = int_{M0} u v J
//   H1        pairing  pi(t;u,v) = int_{M0} u v J + grad u . B grad v,
//             B = A^{-T} (DPhi^T DPhi) A^{-1} J  (tangential sandwich 1/J)
//   Hminus1   pairing  pi(t;u,v) = <M0 u, K_B(t)^{-1} M0 v>  on the interval
//             with homogeneous Dirichlet data
//   DualFlowL1 on a closed curve moved by two flows with equal normal speed:
//             pi(t;u,v) = int_{G0} (u o R_t) v,  R_t = Phi_0^t o ~Phi_t^0
//
// The extra term lambda(t;u,v) is the exact time derivative of pi along
// transported data; each closed form below satisfies that identity at the
// discrete level, which is what the finite-difference oracles verify.
//
//   L2:        int_{M(t)} u v div_g w
//   H1:        int_{M(t)} u v div_g w + grad u^T H grad v
//   Hminus1:  -int_{O(t)} H grad(L_t^{-1} u) . grad(L_t^{-1} v)
//   DualFlow:  int pushed-reference-gradient(u) . D Phi_0^t (w~ - w) v,
//              realized in the curve parameter (angle) by nodal sampling.
//
// Gradients of pushforwards are represented isoparametrically through the
// flow Jacobian, so all forms reduce to per-quadrature-point scalars
// (stretch J and tangential divergence).
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "efem/assembly.hpp"
#include "efem/evolving_mesh.hpp"

namespace efem {

enum class Pivot { L2, H1, Hminus1, DualFlowL1 };

std::string pivot_name(Pivot p);

template <int d>
struct PivotSpec {
  Pivot variant = Pivot::L2;
  // DualFlowL1 only: the second flow over the same reference curve. Must
  // share the normal velocity component with the mesh's own flow.
  const FlowMap<d>* dual_flow = nullptr;
};

// Max mismatch of the normal velocity components of the two flows over
// sample points of the pushed curve (radial normal convention for the
// circle catalog). DualFlowL1 requires this to vanish.
double dual_pair_normal_mismatch(const EvolvingMesh<2>& mesh,
                                 const FlowMap<2>& dual, double t);

// ---------------------------------------------------------------------------
// Pushforward of a coefficient vector: nodal coefficients are unchanged;
// point evaluation pulls x back through the flow and interpolates on the
// reference mesh.
template <int d>
class PushedFunction {
 public:
  PushedFunction(const EvolvingMesh<d>* mesh, Vector full_coeffs, double t)
      : mesh_(mesh), coeffs_(std::move(full_coeffs)), t_(t) {}
  double operator()(const Vec<d>& x) const;  // throws outside M(t)
  const Vector& coefficients() const { return coeffs_; }

 private:
  const EvolvingMesh<d>* mesh_;
  Vector coeffs_;
  double t_;
};

template <int d>
PushedFunction<d> pushforward(const EvolvingMesh<d>& mesh, const FeFunction& u,
                              double t);

// Pullback is the exact inverse on coefficients.
template <int d>
FeFunction pullback(const EvolvingMesh<d>& mesh, const PushedFunction<d>& u,
                    double t, SpaceTag tag = SpaceTag::Full);

// ---------------------------------------------------------------------------
// Transported reference forms (J-weighted mass, B-weighted stiffness and
// their exact time derivatives). Full node set.
template <int d>
struct TransportedForms {
  Matrix mass_J;        // int u v J
  Matrix mass_Jdiv;     // int u v J (div_g o Phi)    = d/dt mass_J
  Matrix stiff_B;       // int grad u . B grad v
  Matrix stiff_Bdot;    // d/dt stiff_B
};
template <int d>
TransportedForms<d> transported_forms(const EvolvingMesh<d>& mesh, double t);

// Vectors are full-node coefficient vectors, except for Hminus1 where they
// live on interior nodes (zero-boundary space).
//
// reference_pairing: the discrete pi(t; u0, v0) for reference data.
template <int d>
double reference_pairing(const PivotSpec<d>& pivot, const EvolvingMesh<d>& mesh,
                         double t, const Vector& u0, const Vector& v0);

// lambda at the pushforwards of reference data (the object whose identity
// with d/dt pi the oracles check).
template <int d>
double lambda_form_transported(const PivotSpec<d>& pivot,
                               const EvolvingMesh<d>& mesh, double t,
                               const Vector& u0, const Vector& v0);

// lambda at functions given by nodal values at time t. For L2/H1/DualFlow
// the transported-basis coefficients coincide with reference coefficients;
// for Hminus1 the load is taken as M_J(t) u (the function u at time t).
template <int d>
double lambda_form(const PivotSpec<d>& pivot, const EvolvingMesh<d>& mesh,
                   double t, const Vector& u, const Vector& v);

// ---------------------------------------------------------------------------
// Discrete realization of Pi_t (Galerkin projection into the P1 space) and
// its inverse.
struct PiOperator {
  double time = 0.0;
  Pivot pivot = Pivot::L2;
  Matrix forward;
  Matrix inverse;
};

template <int d>
PiOperator pi_matrix(const PivotSpec<d>& pivot, const EvolvingMesh<d>& mesh,
                     double t);

// Reference pairing of two coefficient vectors for the pivot (constant in
// t): L2 mass, H1 inner product, Hminus1 dual pairing, L1-L-infinity.
template <int d>
double reference_pivot_pairing(const PivotSpec<d>& pivot,
                               const EvolvingMesh<d>& mesh, const Vector& a,
                               const Vector& b);

// ---------------------------------------------------------------------------
// (f, g)_{H^-1(O(t))} = (M(t) f)^T K(t)^{-1} (M(t) g) on interior nodes of
// the interval with homogeneous Dirichlet data.
template <int d>
double hminus1_inner(const EvolvingMesh<d>& mesh, double t,
                     const Vector& f_interior, const Vector& g_interior);

// ---------------------------------------------------------------------------
enum class NormTag { L2, H1, W1r, Hminus1 };

struct CompatibilityReport {
  double max_ratio = 1.0;  // sup over samples/time of |phi_t u|_X(t)/|u|_X0
  double min_ratio = 1.0;
  // exp(c_w T) with c_w the field's divergence bound; the dual norm pairs a
  // growing mass with a growing inverse stiffness, so it gets exp(3 c_w T/2).
  double gronwall_bound = 1.0;
};

template <int d>
CompatibilityReport compatibility_report(const EvolvingMesh<d>& mesh,
                                         NormTag norm,
                                         const std::vector<double>& grid,
                                         double r = 2.0, int n_random = 5,
                                         std::uint64_t seed = 1);

// Largest singular values of Pi_t forward/inverse over a time grid.
template <int d>
std::pair<double, double> pi_operator_norms(const PivotSpec<d>& pivot,
                                            const EvolvingMesh<d>& mesh,
                                            const std::vector<double>& grid);

}  // namespace efem
