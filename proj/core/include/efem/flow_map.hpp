// Flow maps Phi_t(p) generated by a velocity field, integrated jointly with
// the variational equation for the Jacobian:
//
//   d/dt Phi      = w(t, Phi),           Phi_0  = id,
//   d/dt DPhi     = Dw(t, Phi) DPhi,     DPhi_0 = Id.
//
// The integrator is the classical 4th-order one-step method with a fixed
// number of equal substeps per query, so t -> Phi_t(p) is a smooth function
// of t (no step-grid switching) and results are deterministic.
//
// Derived quantities per sample: the Jacobian determinant J (tangential
// stretch |DPhi tau0| on curves, |det DPhi| on flat domains), the metric
// A = DPhi^T DPhi (rank-completed with nu0 x nu0 on curves) and det A.
#pragma once

#include "efem/errors.hpp"
#include "efem/types.hpp"
#include "efem/velocity_field.hpp"

namespace efem {

template <int d>
struct GeometrySample {
  Vec<d> position = Vec<d>::Zero();
  Mat<d> jac = Mat<d>::Identity();
  double jdet = 1.0;
  Mat<d> metric = Mat<d>::Identity();
  double metric_det = 1.0;
};

// Raw trajectory state (position + variational Jacobian).
template <int d>
struct FlowState {
  Vec<d> x = Vec<d>::Zero();
  Mat<d> jac = Mat<d>::Identity();
};

template <int d>
class FlowMap {
 public:
  FlowMap(VelocityField<d> field, double horizon, int substeps_per_unit = 64);

  const VelocityField<d>& field() const { return field_; }
  double horizon() const { return horizon_; }
  int substeps_per_unit() const { return substeps_per_unit_; }

  // Conservative global-error bound for the integrator on catalog-type
  // fields (C^4 in time with O(1) derivatives).
  double tolerance() const;

  // Finite band C_J with J in [1/C_J, C_J] over [0, T], from the field's
  // divergence bound.
  double jacobian_bound() const;

  // Trajectory from the identity state at time 0 to time t, using a fixed
  // step count so the result varies smoothly with t.
  FlowState<d> state(const Vec<d>& p, double t) const;

  // Restart integration from an arbitrary state over [t0, t1].
  FlowState<d> advance(FlowState<d> s, double t0, double t1) const;

  // Full geometric sample; tau0 is the reference tangent used for the
  // rank-completed metric on curves (ignored in the flat case).
  GeometrySample<d> sample(const Vec<d>& p, double t,
                           const Vec<d>& tau0 = Vec<d>::UnitX()) const;

  // Inverse flow by reverse-time integration from t down to 0; verifies the
  // forward residual and refines the reverse step count if needed.
  Vec<d> inverse(const Vec<d>& x, double t) const;

 private:
  VelocityField<d> field_;
  double horizon_;
  int substeps_per_unit_;
  int steps_;  // fixed per-query step count
};

template <int d>
GeometrySample<d> evolve_point(const FlowMap<d>& flow, const Vec<d>& p,
                               double t, const Vec<d>& tau0 = Vec<d>::UnitX());

template <int d>
Vec<d> inverse_flow(const FlowMap<d>& flow, const Vec<d>& x, double t);

// H = (div_g w) Id - (Dw + Dw^T), symmetric by construction. The divergence
// is the field's (tangential) divergence; the symmetrized part uses the
// ambient Jacobian, whose tangential sandwich agrees with the tangential
// deformation tensor.
template <int d>
Mat<d> deformation_tensor(const VelocityField<d>& field, double t,
                          const Vec<d>& x);

// Time derivative of the diffusion-pullback tensor B = J DPhi^{-1} DPhi^{-T}
// (flat case):
//
//   dB/dt = (div w o Phi) B - J DPhi^{-1} (Dw + Dw^T) o Phi DPhi^{-T}.
//
// On curves B = J^{-1} tau0 tau0^T and the same cancellation gives
// dB/dt = -(div_g w o Phi) B.
template <int d>
Mat<d> metric_time_derivative(const FlowMap<d>& flow, const Vec<d>& p,
                              double t, const Vec<d>& tau0 = Vec<d>::UnitX());

}  // namespace efem
