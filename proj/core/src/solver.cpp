#include "efem/solver.hpp"

#include <cmath>
#include <numbers>

#include "efem/errors.hpp"
#include "efem/field_catalog.hpp"

namespace efem {

namespace {

template <int d>
std::vector<int> free_nodes(const ProblemConfig<d>& config) {
  if (config.space == SpaceTag::ZeroBoundary)
    return config.mesh->reference().interior_nodes();
  std::vector<int> all(config.mesh->reference().n_nodes());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}

template <int d>
Vector scatter(const ProblemConfig<d>& config, const Vector& u_free) {
  const auto idx = free_nodes(config);
  Vector full = Vector::Zero(config.mesh->reference().n_nodes());
  for (std::size_t k = 0; k < idx.size(); ++k)
    full[idx[k]] = u_free[static_cast<Eigen::Index>(k)];
  return full;
}

template <int d>
bool banded(const ProblemConfig<d>& config) {
  return config.mesh->reference().topology == Topology::IntervalWithBoundary;
}

}  // namespace

template <int d>
std::vector<double> ProblemConfig<d>::grid() const {
  std::vector<double> g(steps + 1);
  for (int k = 0; k <= steps; ++k) g[k] = time(k);
  return g;
}

template <int d>
Vector project_initial(const ProblemConfig<d>& config, const Vector& full) {
  const auto idx = free_nodes(config);
  const Matrix M0 = restrict_matrix(assemble_mass(*config.mesh, 0.0), idx);
  const Vector rhs = restrict_vector(assemble_mass(*config.mesh, 0.0) * full,
                                     idx);
  return solve_spd(M0, rhs, banded(config));
}

template <int d>
Vector step(const ProblemConfig<d>& config, const Vector& u_free, int k,
            std::vector<double>* newton_residuals) {
  const auto& mesh = *config.mesh;
  const auto idx = free_nodes(config);
  const double tau = config.tau();
  const double t0 = config.time(k);
  const double t1 = config.time(k + 1);

  const Matrix M0 = restrict_matrix(assemble_mass(mesh, t0), idx);
  const Matrix M1 = restrict_matrix(assemble_mass(mesh, t1), idx);
  Vector rhs = M0 * u_free;
  if (config.forcing)
    rhs += tau * restrict_vector(assemble_load(mesh, t1, config.forcing), idx);

  auto residual = [&](const Vector& u) -> Vector {
    const Vector full = scatter(config, u);
    const Vector a =
        restrict_vector(nonlinear_residual(config.op, mesh, t1, full), idx);
    return M1 * u + tau * a - rhs;
  };

  Vector u = u_free;  // warm start
  Vector r = residual(u);
  const double scale = std::max(1.0, rhs.norm());
  double rnorm = r.norm();
  if (newton_residuals) newton_residuals->push_back(rnorm);

  for (int it = 0; it < config.newton_max_iter; ++it) {
    if (rnorm <= config.newton_tol * scale) return u;
    const Vector full = scatter(config, u);
    const Matrix Ja =
        restrict_matrix(nonlinear_jacobian(config.op, mesh, t1, full), idx);
    const Matrix J = M1 + tau * Ja;
    const Vector du = solve_spd(J, -r, banded(config));

    // Full step, halve on residual increase, Picard sweep as last resort.
    double s = 1.0;
    Vector u_try, r_try;
    double rnorm_try = std::numeric_limits<double>::infinity();
    for (int halve = 0; halve <= 8; ++halve) {
      u_try = u + s * du;
      r_try = residual(u_try);
      rnorm_try = r_try.norm();
      if (rnorm_try < rnorm) break;
      s *= 0.5;
    }
    if (!(rnorm_try < rnorm)) {
      // Picard sweep: frozen-coefficient operator, one linear solve.
      const Matrix P =
          restrict_matrix(picard_matrix(config.op, mesh, t1, full), idx);
      u_try = solve_spd(M1 + tau * P, rhs, banded(config));
      r_try = residual(u_try);
      rnorm_try = r_try.norm();
    }
    u = u_try;
    r = r_try;
    rnorm = rnorm_try;
    if (newton_residuals) newton_residuals->push_back(rnorm);
  }
  if (rnorm <= config.newton_tol * scale) return u;
  throw NewtonError("Newton stagnated at step " + std::to_string(k + 1),
                    rnorm);
}

template <int d>
SolveResult solve(const ProblemConfig<d>& config) {
  config.op.validate();
  const auto& mesh = *config.mesh;
  const auto idx = free_nodes(config);
  const bool zero_bdry = config.space == SpaceTag::ZeroBoundary;

  SolveResult result;
  Vector u = project_initial(config, config.initial_full);
  result.trajectory.push_back(u);

  auto diag_at = [&](int k, const Vector& uf, double xp_accum,
                     std::vector<double> newton) {
    StepDiagnostics dg;
    dg.time = config.time(k);
    const Matrix M = restrict_matrix(assemble_mass(mesh, dg.time), idx);
    const Vector ones = Vector::Ones(uf.size());
    dg.mass = ones.dot(M * uf);
    dg.h_norm_sq = uf.dot(M * uf);
    dg.xp_accum = xp_accum;
    dg.newton_iters = std::max<int>(0, static_cast<int>(newton.size()) - 1);
    dg.newton_residuals = std::move(newton);
    if (!std::isfinite(dg.mass) || !std::isfinite(dg.h_norm_sq))
      throw NewtonError("diverged state: non-finite diagnostics", dg.mass);
    return dg;
  };

  double xp_accum = 0.0;
  result.diagnostics.push_back(diag_at(0, u, 0.0, {}));
  if (config.store_residual) {
    const Vector full = scatter(config, u);
    Vector g = -restrict_vector(
        nonlinear_residual(config.op, mesh, 0.0, full), idx);
    if (config.forcing)
      g += restrict_vector(assemble_load(mesh, 0.0, config.forcing), idx);
    result.residual_g.push_back(g);
  }

  for (int k = 0; k < config.steps; ++k) {
    std::vector<double> newton;
    u = step(config, u, k, &newton);
    const double t1 = config.time(k + 1);
    xp_accum += config.tau() *
                xnorm_p(config.op, mesh, t1, scatter(config, u), zero_bdry);
    result.trajectory.push_back(u);
    result.diagnostics.push_back(diag_at(k + 1, u, xp_accum, std::move(newton)));
    if (config.store_residual) {
      const Vector full = scatter(config, u);
      Vector g = -restrict_vector(
          nonlinear_residual(config.op, mesh, t1, full), idx);
      if (config.forcing)
        g += restrict_vector(assemble_load(mesh, t1, config.forcing), idx);
      result.residual_g.push_back(g);
    }
  }
  return result;
}

template <int d>
std::vector<StabilityRow> stability_experiment(const ProblemConfig<d>& config,
                                               const Vector& u0a_full,
                                               const Vector& u0b_full) {
  ProblemConfig<d> ca = config;
  ca.initial_full = u0a_full;
  ProblemConfig<d> cb = config;
  cb.initial_full = u0b_full;
  const SolveResult ra = solve(ca);
  const SolveResult rb = solve(cb);
  const auto idx = free_nodes(config);
  const double cw = config.mesh->flow().field().divergence_sup;

  const Matrix M00 = restrict_matrix(assemble_mass(*config.mesh, 0.0), idx);
  const Vector d0 = ra.trajectory[0] - rb.trajectory[0];
  const double norm0 = std::sqrt(d0.dot(M00 * d0));

  std::vector<StabilityRow> rows;
  for (int k = 0; k <= config.steps; ++k) {
    const double t = config.time(k);
    const Matrix M = restrict_matrix(assemble_mass(*config.mesh, t), idx);
    const Vector diff = ra.trajectory[k] - rb.trajectory[k];
    StabilityRow row;
    row.k = k;
    row.time = t;
    row.diff_norm = std::sqrt(diff.dot(M * diff));
    row.bound = std::exp(0.5 * cw * t) * norm0;
    row.ratio = row.bound > 0.0 ? row.diff_norm / row.bound : 0.0;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------

double ManufacturedHeat::exact(double t, double x) const {
  return std::exp(-t) * std::sin(std::numbers::pi * x * std::exp(-alpha * t));
}

double ManufacturedHeat::forcing(double t, double x) const {
  const double xi = x * std::exp(-alpha * t);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return std::exp(-t) * std::sin(std::numbers::pi * xi) *
         (pi2 * std::exp(-2.0 * alpha * t) + alpha - 1.0);
}

double ManufacturedHeat::initial(double x) const {
  return std::sin(std::numbers::pi * x);
}

namespace {

// L2(Omega(T)) error of the final iterate against the exact solution, by
// the 3-point rule on pushed elements (solution values interpolated at the
// transported quadrature parameters).
double final_error(const EvolvingMesh<1>& mesh, const ManufacturedHeat& mh,
                   const Vector& full, double T) {
  const auto& ref = mesh.reference();
  const auto g = mesh.geometry(T);
  const auto qd = mesh.quad_data(T);
  double acc = 0.0;
  for (int e = 0; e < ref.n_elements(); ++e) {
    const auto [i, j] = ref.elements[e];
    for (int q = 0; q < GaussRule3::n; ++q) {
      const double qq = GaussRule3::points[q];
      const double uh = (1.0 - qq) * full[i] + qq * full[j];
      const double ue = mh.exact(T, qd[e][q].x(0));
      acc += g.elem_len[e] * GaussRule3::weights[q] * (uh - ue) * (uh - ue);
    }
  }
  return std::sqrt(acc);
}

ConvergenceRow run_level(const ManufacturedHeat& mh, double T, int n,
                         int steps, int substeps) {
  FieldParams fp;
  fp.rate = mh.alpha;
  FlowMap<1> flow(make_field<1>("dilation", fp, T), T, substeps);
  ProblemConfig<1> config;
  EvolvingMesh<1> mesh(build_interval_mesh(0.0, 1.0, n), flow,
                       [&] {
                         std::vector<double> g(steps + 1);
                         for (int k = 0; k <= steps; ++k) g[k] = T * k / steps;
                         return g;
                       }());
  config.mesh = &mesh;
  config.op.kind = OperatorKind::LinearDiffusion;
  config.space = SpaceTag::ZeroBoundary;
  config.T = T;
  config.steps = steps;
  config.forcing = [&mh](double t, const Vec<1>& x) {
    return mh.forcing(t, x(0));
  };
  Vector init(n + 1);
  for (int i = 0; i <= n; ++i)
    init[i] = mh.initial(mesh.reference().node_parameter[i]);
  config.initial_full = init;

  const SolveResult res = solve(config);
  Vector full = Vector::Zero(n + 1);
  const auto idx = mesh.reference().interior_nodes();
  for (std::size_t k = 0; k < idx.size(); ++k)
    full[idx[k]] = res.trajectory.back()[static_cast<Eigen::Index>(k)];

  ConvergenceRow row;
  row.n = n;
  row.steps = steps;
  row.h = 1.0 / n;
  row.tau = T / steps;
  row.error_l2 = final_error(mesh, mh, full, T);
  return row;
}

}  // namespace

std::vector<ConvergenceRow> convergence_study_spatial(
    const ManufacturedHeat& mh, double T, int levels, int n0, int steps0,
    int substeps_per_unit) {
  std::vector<ConvergenceRow> rows;
  for (int l = 0; l < levels; ++l) {
    const int n = n0 << l;
    const int steps = steps0 << (2 * l);  // tau ~ h^2
    rows.push_back(run_level(mh, T, n, steps, substeps_per_unit));
  }
  return rows;
}

std::vector<ConvergenceRow> convergence_study_temporal(
    const ManufacturedHeat& mh, double T, int levels, int n, int steps0,
    int substeps_per_unit) {
  std::vector<ConvergenceRow> rows;
  for (int l = 0; l < levels; ++l)
    rows.push_back(run_level(mh, T, n, steps0 << l, substeps_per_unit));
  return rows;
}

std::vector<double> eoc(const std::vector<ConvergenceRow>& rows) {
  std::vector<double> orders;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k)
    orders.push_back(std::log2(rows[k].error_l2 / rows[k + 1].error_l2));
  return orders;
}

template <int d>
double weak_derivative_residual(const ProblemConfig<d>& config) {
  ProblemConfig<d> pc = config;
  pc.store_residual = true;
  const SolveResult res = solve(pc);
  const auto idx = free_nodes(pc);
  const double tau = pc.tau();

  double worst = 0.0;
  const int stride = std::max(1, pc.steps / 8);
  for (int k = 1; k < pc.steps; k += stride) {
    const Matrix Mp =
        restrict_matrix(assemble_mass(*pc.mesh, pc.time(k + 1)), idx);
    const Matrix Mm =
        restrict_matrix(assemble_mass(*pc.mesh, pc.time(k - 1)), idx);
    const Vector fd =
        (Mp * res.trajectory[k + 1] - Mm * res.trajectory[k - 1]) /
        (2.0 * tau);
    worst = std::max(
        worst, (fd - res.residual_g[k]).template lpNorm<Eigen::Infinity>());
  }
  return worst;
}

template struct ProblemConfig<1>;
template struct ProblemConfig<2>;
template Vector step<1>(const ProblemConfig<1>&, const Vector&, int,
                        std::vector<double>*);
template Vector step<2>(const ProblemConfig<2>&, const Vector&, int,
                        std::vector<double>*);
template SolveResult solve<1>(const ProblemConfig<1>&);
template SolveResult solve<2>(const ProblemConfig<2>&);
template Vector project_initial<1>(const ProblemConfig<1>&, const Vector&);
template Vector project_initial<2>(const ProblemConfig<2>&, const Vector&);
template std::vector<StabilityRow> stability_experiment<1>(
    const ProblemConfig<1>&, const Vector&, const Vector&);
template std::vector<StabilityRow> stability_experiment<2>(
    const ProblemConfig<2>&, const Vector&, const Vector&);
template double weak_derivative_residual<1>(const ProblemConfig<1>&);
template double weak_derivative_residual<2>(const ProblemConfig<2>&);

}  // namespace efem
