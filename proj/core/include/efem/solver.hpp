// Galerkin time stepping for  du + A u + Lambda u = f  on the moving
// geometry, in conservative product form:
//
//   ( M(t_{k+1}) U_{k+1} - M(t_k) U_k ) / tau + A(t_{k+1}; U_{k+1})
//       = F(t_{k+1}),
//
// solved per step by damped Newton. The difference of mass matrices absorbs
// the lambda term exactly at the discrete level, which is what makes the
// scheme conserve mass on closed curves: left-multiplying by the all-ones
// vector kills A and F for pure diffusion, so 1^T M U telescopes.
#pragma once

#include <optional>

#include "efem/assembly.hpp"
#include "efem/operators.hpp"

namespace efem {

template <int d>
struct ProblemConfig {
  const EvolvingMesh<d>* mesh = nullptr;
  OperatorSpec op;
  ScalarField<d> forcing;            // empty => zero load
  Vector initial_full;               // nodal values of u0 over all nodes
  SpaceTag space = SpaceTag::Full;   // ZeroBoundary clamps interval ends
  double T = 1.0;
  int steps = 100;
  double newton_tol = 1e-11;
  int newton_max_iter = 25;
  bool store_residual = false;       // keep g_k = F(t_k) - A(t_k; U_k)

  double tau() const { return T / steps; }
  double time(int k) const { return T * k / steps; }
  std::vector<double> grid() const;
};

struct StepDiagnostics {
  double time = 0.0;
  double mass = 0.0;        // 1^T M(t) U
  double h_norm_sq = 0.0;   // U^T M(t) U
  double xp_accum = 0.0;    // running tau * |u|_X^p
  int newton_iters = 0;
  std::vector<double> newton_residuals;  // per-iteration norms
};

struct SolveResult {
  std::vector<Vector> trajectory;        // free coefficients U_0 .. U_N
  std::vector<StepDiagnostics> diagnostics;  // entries 0..N (0 = initial)
  std::vector<Vector> residual_g;        // nodal g_k when requested
};

// One implicit step U_k -> U_{k+1}; exposed for the reduction tests.
template <int d>
Vector step(const ProblemConfig<d>& config, const Vector& u_free, int k,
            std::vector<double>* newton_residuals = nullptr);

template <int d>
SolveResult solve(const ProblemConfig<d>& config);

// L2-projection of nodal data onto the free space via the reference mass.
template <int d>
Vector project_initial(const ProblemConfig<d>& config, const Vector& full);

// Perturbation ratios against the Gronwall envelope exp(C_w t / 2).
struct StabilityRow {
  int k;
  double time;
  double diff_norm;   // |u1 - u2|_{H(t_k)}
  double bound;       // exp(C_w t_k / 2) |u10 - u20|_{H_0}
  double ratio;
};
template <int d>
std::vector<StabilityRow> stability_experiment(const ProblemConfig<d>& config,
                                               const Vector& u0a_full,
                                               const Vector& u0b_full);

// Manufactured heat problem on the dilating interval (0,1) -> (0,e^{at}):
//   u(t,x) = e^{-t} sin(pi x e^{-at}),   material derivative -u,
//   f = e^{-t} sin(pi x e^{-at}) (pi^2 e^{-2at} + a - 1).
struct ManufacturedHeat {
  double alpha = 0.1;
  double exact(double t, double x) const;
  double forcing(double t, double x) const;
  double initial(double x) const;
};

struct ConvergenceRow {
  int n;
  int steps;
  double h;
  double tau;
  double error_l2;  // L2(Omega(T)) error against the manufactured solution
};
// Spatial study: h-halving with tau ~ h^2; temporal study: tau-halving at
// fixed fine mesh.
std::vector<ConvergenceRow> convergence_study_spatial(
    const ManufacturedHeat& mh, double T, int levels, int n0, int steps0,
    int substeps_per_unit = 64);
std::vector<ConvergenceRow> convergence_study_temporal(
    const ManufacturedHeat& mh, double T, int levels, int n, int steps0,
    int substeps_per_unit = 64);

// Experimental orders log2(e_i / e_{i+1}).
std::vector<double> eoc(const std::vector<ConvergenceRow>& rows);

// Weak-derivative characterization residual for a completed solve with the
// L2 pivot: the centered difference of (u(t), phi_t e_j)_H across steps
// against the stored residual functional g = F - A(u), maximized over the
// free basis vectors and sampled steps. First-order consistent for the
// implicit scheme.
template <int d>
double weak_derivative_residual(const ProblemConfig<d>& config);

}  // namespace efem
