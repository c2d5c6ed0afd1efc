// Finite-difference oracles certifying the closed-form identities: the
// Jacobian ODE, the metric-rate formula, the gradient-pullback identity,
// the lambda forms (as exact derivatives of the transported pairings) and
// the transport theorem d/dt (u,v)_H = <du,v> + <u,dv> + lambda(u,v).
//
// Central differences with step halving h in {1e-2, 5e-3, 2.5e-3}; the
// reported order is log2 of the residual ratio of the two finest levels.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "efem/spaces.hpp"

namespace efem {

struct CheckReport {
  std::string name;
  std::vector<double> h;
  std::vector<double> residual;
  double order = 0.0;   // log2(residual[n-2]/residual[n-1])
  double tolerance = 0.0;
  bool pass = false;

  double max_residual() const;
  // pass if order in [lo,hi], or every residual is below `floor`
  // (zero cases where the FD signal is pure roundoff).
  void judge_order(double lo, double hi, double floor = 1e-12);
  void judge_residual(double tol);
  std::string csv() const;  // "# columns: h, residual, order" listing
};

std::vector<double> default_fd_steps();

// Smooth coefficient path c(t) with analytic derivative; trajectories for
// the transport-theorem checks.
struct CoefficientPath {
  std::function<Vector(double)> value;
  std::function<Vector(double)> derivative;
};

// Fixed-seed random path: per-node smooth t-dependence built from the LCG.
CoefficientPath random_path(int n_nodes, std::uint64_t seed);

// |FD_t J - (div_g w o Phi) J| at sample points.
template <int d>
CheckReport check_jacobian_ode(const FlowMap<d>& flow,
                               const std::vector<Vec<d>>& points, double t,
                               const std::vector<Vec<d>>& tangents = {});

// FD of B = J DPhi^{-1} DPhi^{-T} against metric_time_derivative.
template <int d>
CheckReport check_metric_rate(const FlowMap<d>& flow,
                              const std::vector<Vec<d>>& points, double t,
                              const std::vector<Vec<d>>& tangents = {});

// FD in the seed point of Phi_t(p) against the variational Jacobian.
template <int d>
CheckReport check_variational_jacobian(const FlowMap<d>& flow,
                                       const std::vector<Vec<d>>& points,
                                       double t);

// Per-element identity grad0(pullback u) = (D_g0 Phi)^T pullback(grad u)
// with discrete tangents; exact up to roundoff.
template <int d>
CheckReport check_gradient_pullback(const EvolvingMesh<d>& mesh,
                                    const Vector& full_u, double t);

// FD of the transported pairing pi(t;u0,v0) against lambda at the
// pushforwards.
template <int d>
CheckReport check_lambda_oracle(const PivotSpec<d>& pivot,
                                const EvolvingMesh<d>& mesh, double t,
                                const Vector& u0, const Vector& v0);

// FD of <u(t), v(t)> along smooth coefficient trajectories against
// <du,v> + <u,dv> + lambda.
template <int d>
CheckReport check_transport_theorem(const PivotSpec<d>& pivot,
                                    const EvolvingMesh<d>& mesh,
                                    const CoefficientPath& u,
                                    const CoefficientPath& v, double t);

// Consistency of d/dt (u_h(t), phi_t v)_H with <f - A u_h, phi_t v> along a
// computed solution; first order for the implicit scheme. Residuals are
// reported per time-step size tau (halved across levels).
struct WeakDerivativeCheckInput {
  std::vector<double> taus;                 // descending
  std::function<double(double)> residual;   // max residual at given tau
};
CheckReport check_weak_derivative_characterization(
    const WeakDerivativeCheckInput& input);

void write_check_csv(const CheckReport& report, const std::string& path);

}  // namespace efem
