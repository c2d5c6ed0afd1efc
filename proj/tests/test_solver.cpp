// Solver tests: operator residuals against hand integrals, reduction of the
// moving-mesh step to the classical scheme, eigen-decay recurrence, mass
// conservation, monotonicity/coercivity witnesses, Newton tail behaviour,
// the discrete energy estimate, stability ratios and the manufactured
// convergence study.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "efem/field_catalog.hpp"
#include "efem/solver.hpp"

using namespace efem;

namespace {

EvolvingMesh<1> interval_mesh(const std::string& field, double rate, int n,
                              std::vector<double> grid = {}) {
  FieldParams fp;
  fp.rate = rate;
  fp.speed = rate;
  return EvolvingMesh<1>(build_interval_mesh(0.0, 1.0, n),
                         FlowMap<1>(make_field<1>(field, fp, 1.0), 1.0, 64),
                         std::move(grid));
}

Vector random_vec(int n, std::uint64_t seed) {
  Lcg rng(seed);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

ReferenceMesh<1> unit_element() {
  ReferenceMesh<1> mesh;
  mesh.nodes = {Vec<1>::Constant(0.0), Vec<1>::Constant(1.0)};
  mesh.node_parameter = {0.0, 1.0};
  mesh.elements = {{0, 1}};
  mesh.boundary = {0, 1};
  return mesh;
}

}  // namespace

TEST_CASE("p = 2 residual reduces to the stiffness action") {
  auto mesh = interval_mesh("dilation", 0.2, 12);
  OperatorSpec op;
  op.kind = OperatorKind::PLaplace;
  op.p = 2.0;
  op.epsilon = 0.0;
  const Vector u = random_vec(13, 3);
  const Vector r = nonlinear_residual(op, mesh, 0.5, u);
  const Vector ku = assemble_stiffness(mesh, 0.5) * u;
  CHECK((r - ku).lpNorm<Eigen::Infinity>() <= 1e-13);
}

TEST_CASE("zero coefficients give a zero residual for any exponent") {
  auto mesh = interval_mesh("dilation", 0.2, 8);
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    OperatorSpec op;
    op.kind = OperatorKind::PLaplace;
    op.p = p;
    op.epsilon = 1e-8;
    op.alpha = 0.3;
    const Vector r = nonlinear_residual(op, mesh, 0.4, Vector::Zero(9));
    CHECK(r.lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("p = 4 flux on a unit element is the cubed slope") {
  EvolvingMesh<1> mesh(unit_element(),
                       FlowMap<1>(make_field<1>("zero", {}, 1.0), 1.0, 64));
  OperatorSpec op;
  op.kind = OperatorKind::PLaplace;
  op.p = 4.0;
  op.epsilon = 0.0;
  const double s = 0.7;
  Vector u(2);
  u << 0.0, s;
  const Vector r = nonlinear_residual(op, mesh, 0.0, u);
  CHECK(r[0] == doctest::Approx(-s * s * s).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(s * s * s).epsilon(1e-14));
}

TEST_CASE("step: zero data stays zero") {
  auto mesh = interval_mesh("dilation", 0.2, 8);
  ProblemConfig<1> pc;
  pc.mesh = &mesh;
  pc.op.kind = OperatorKind::PLaplace;
  pc.op.p = 3.0;
  pc.op.epsilon = 1e-8;
  pc.space = SpaceTag::ZeroBoundary;
  pc.steps = 10;
  const Vector u1 = step(pc, Vector::Zero(7), 0);
  CHECK(u1.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("static heat step equals the classical implicit Euler step") {
  auto mesh = interval_mesh("zero", 0.0, 16);
  ProblemConfig<1> pc;
  pc.mesh = &mesh;
  pc.op.kind = OperatorKind::LinearDiffusion;
  pc.space = SpaceTag::ZeroBoundary;
  pc.steps = 20;
  const auto idx = mesh.reference().interior_nodes();
  const Matrix M = restrict_matrix(assemble_mass(mesh, 0.0), idx);
  const Matrix K = restrict_matrix(assemble_stiffness(mesh, 0.0), idx);
  const Vector u0 = random_vec(15, 5);
  const Vector expect = solve_spd(M + pc.tau() * K, M * u0, true);
  const Vector got = step(pc, u0, 0);
  CHECK((got - expect).lpNorm<Eigen::Infinity>() <= 1e-13);
}

TEST_CASE("eigenfunction decay follows the scalar recurrence") {
  const int n = 16;
  auto mesh = interval_mesh("zero", 0.0, n);
  ProblemConfig<1> pc;
  pc.mesh = &mesh;
  pc.op.kind = OperatorKind::LinearDiffusion;
  pc.space = SpaceTag::ZeroBoundary;
  pc.T = 0.5;
  pc.steps = 25;
  // sin(pi x) at the interior nodes is a discrete eigenvector of (K, M) on
  // the uniform mesh; lambda_h from the Rayleigh quotient.
  Vector v(n - 1);
  Vector full = Vector::Zero(n + 1);
  for (int i = 1; i < n; ++i) {
    v[i - 1] = std::sin(std::numbers::pi * i / n);
    full[i] = v[i - 1];
  }
  const auto idx = mesh.reference().interior_nodes();
  const Matrix M = restrict_matrix(assemble_mass(mesh, 0.0), idx);
  const Matrix K = restrict_matrix(assemble_stiffness(mesh, 0.0), idx);
  const double lambda_h = v.dot(K * v) / v.dot(M * v);
  pc.initial_full = full;
  const SolveResult res = solve(pc);
  const double factor = 1.0 / (1.0 + pc.tau() * lambda_h);
  for (int k : {5, 15, 25}) {
    const Vector expect = std::pow(factor, k) * v;
    CHECK((res.trajectory[k] - expect).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("mass conservation on the expanding circle") {
  FieldParams fp;
  fp.rate = 0.15;
  const int steps = 60;
  std::vector<double> grid(steps + 1);
  for (int k = 0; k <= steps; ++k) grid[k] = 1.0 * k / steps;
  EvolvingMesh<2> mesh(build_circle_mesh(1.0, 48),
                       FlowMap<2>(make_field<2>("dilation", fp, 1.0), 1.0, 64),
                       grid);
  ProblemConfig<2> pc;
  pc.mesh = &mesh;
  pc.op.kind = OperatorKind::LinearDiffusion;
  pc.space = SpaceTag::Full;
  pc.T = 1.0;
  pc.steps = steps;
  Vector u0(48);
  for (int i = 0; i < 48; ++i)
    u0[i] = 1.0 + 0.5 * std::sin(mesh.reference().node_parameter[i]);
  pc.initial_full = u0;
  const SolveResult res = solve(pc);
  const double mass0 = res.diagnostics[0].mass;
  for (int k = 1; k <= steps; ++k)
    CHECK(std::abs(res.diagnostics[k].mass - mass0) <= 1e-12 * k);
}

TEST_CASE("H-norm is non-increasing for f = 0 on a static domain") {
  auto mesh = interval_mesh("zero", 0.0, 24);
  ProblemConfig<1> pc;
  pc.mesh = &mesh;
  pc.op.kind = OperatorKind::PLaplace;
  pc.op.p = 3.0;
  pc.op.epsilon = 1e-8;
  pc.space = SpaceTag::ZeroBoundary;
  pc.T = 0.5;
  pc.steps = 50;
  Vector full = Vector::Zero(25);
  for (int i = 1; i < 24; ++i)
    full[i] = std::sin(std::numbers::pi * i / 24.0) +
              0.3 * std::sin(3 * std::numbers::pi * i / 24.0);
  pc.initial_full = full;
  const SolveResult res = solve(pc);
  for (std::size_t k = 1; k < res.diagnostics.size(); ++k)
    CHECK(res.diagnostics[k].h_norm_sq <=
          res.diagnostics[k - 1].h_norm_sq * (1.0 + 1e-12));
}

TEST_CASE("monotonicity witness over 100 seeded pairs") {
  auto mesh = interval_mesh("dilation", 0.2, 16);
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    OperatorSpec op;
    op.kind = OperatorKind::PLaplace;
    op.p = p;
    op.epsilon = 1e-8;
    op.alpha = 0.2;
    Lcg rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
      Vector u(17), v(17);
      for (int i = 0; i < 17; ++i) u[i] = rng.uniform(-2.0, 2.0);
      for (int i = 0; i < 17; ++i) v[i] = rng.uniform(-2.0, 2.0);
      const double gap = (nonlinear_residual(op, mesh, 0.3, u) -
                          nonlinear_residual(op, mesh, 0.3, v))
                             .dot(u - v);
      CHECK(gap >= -1e-12);
    }
  }
}

TEST_CASE("coercivity witness with the documented constants") {
  auto mesh = interval_mesh("dilation", 0.2, 16);
  const auto g = mesh.geometry(0.6);
  double measure = 0.0;
  for (double L : g.elem_len) measure += L;

  SUBCASE("gradient norm on the zero-boundary interval") {
    for (double p : {1.5, 2.0, 3.0}) {
      OperatorSpec op;
      op.kind = OperatorKind::PLaplace;
      op.p = p;
      op.epsilon = 1e-8;
      const auto [cc, cslack] = op.coercivity_constants(true, measure);
      CHECK(cc == 1.0);
      Lcg rng(77);
      for (int trial = 0; trial < 100; ++trial) {
        // Smooth unit-scale samples keep the absolute slack meaningful.
        Vector u = Vector::Zero(17);
        for (int k = 1; k <= 3; ++k) {
          const double a = rng.uniform(-0.5, 0.5) / k;
          for (int i = 1; i < 16; ++i)
            u[i] += a * std::sin(k * std::numbers::pi * i / 16.0);
        }
        const double lhs = nonlinear_residual(op, mesh, 0.6, u).dot(u);
        const double rhs = cc * xnorm_p(op, mesh, 0.6, u, true) - cslack;
        CHECK(lhs >= rhs - 1e-12);
      }
    }
  }
  SUBCASE("full norm with the zeroth-order term on the circle") {
    FieldParams fp;
    fp.rate = 0.15;
    EvolvingMesh<2> cmesh(
        build_circle_mesh(1.0, 24),
        FlowMap<2>(make_field<2>("dilation", fp, 1.0), 1.0, 64));
    const auto cg = cmesh.geometry(0.6);
    double cmeasure = 0.0;
    for (double L : cg.elem_len) cmeasure += L;
    OperatorSpec op;
    op.kind = OperatorKind::PLaplace;
    op.p = 3.0;
    op.epsilon = 1e-8;
    op.alpha = 0.5;
    const auto [cc, cslack] = op.coercivity_constants(false, cmeasure);
    CHECK(cc == 0.5);
    Lcg rng(78);
    for (int trial = 0; trial < 100; ++trial) {
      Vector u = Vector::Zero(24);
      for (int k = 1; k <= 3; ++k) {
        const double a = rng.uniform(-0.5, 0.5) / k;
        const double ph = rng.uniform(0.0, 2.0 * std::numbers::pi);
        for (int i = 0; i < 24; ++i)
          u[i] += a * std::sin(k * cmesh.reference().node_parameter[i] + ph);
      }
      const double lhs = nonlinear_residual(op, cmesh, 0.6, u).dot(u);
      const double rhs = cc * xnorm_p(op, cmesh, 0.6, u, false) - cslack;
      CHECK(lhs >= rhs - 1e-12);
    }
  }
}

TEST_CASE("Newton tail is superlinear for the p-Laplace steps") {
  auto mesh = interval_mesh("dilation", 0.2, 32);
  for (double p : {1.5, 3.0, 4.0}) {
    ProblemConfig<1> pc;
    pc.mesh = &mesh;
    pc.op.kind = OperatorKind::PLaplace;
    pc.op.p = p;
    pc.op.epsilon = 1e-8;
    pc.space = SpaceTag::ZeroBoundary;
    pc.T = 1.0;
    pc.steps = 10;
    pc.newton_tol = 1e-13;
    Vector full = Vector::Zero(33);
    for (int i = 1; i < 32; ++i)
      full[i] = 5.0 * std::sin(std::numbers::pi * i / 32.0);
    pc.initial_full = full;
    std::vector<double> resid;
    (void)step(pc, project_initial(pc, full), 0, &resid);
    // Order estimate from the last three residuals above the floor.
    std::vector<double> r;
    for (double v : resid)
      if (v > 1e-13) r.push_back(v);
    REQUIRE(r.size() >= 3);
    const std::size_t m = r.size();
    const double order = std::log(r[m - 1] / r[m - 2]) /
                         std::log(r[m - 2] / r[m - 3]);
    CHECK(order >= 1.5);
  }
}

TEST_CASE("discrete energy estimate with Gronwall factor") {
  const double alpha = 0.2;
  auto mesh = interval_mesh("dilation", alpha, 24);
  ProblemConfig<1> pc;
  pc.mesh = &mesh;
  pc.op.kind = OperatorKind::PLaplace;
  pc.op.p = 3.0;
  pc.op.epsilon = 1e-8;
  pc.space = SpaceTag::ZeroBoundary;
  pc.T = 1.0;
  pc.steps = 50;
  Vector full = Vector::Zero(25);
  for (int i = 1; i < 24; ++i)
    full[i] = std::sin(std::numbers::pi * i / 24.0);
  pc.initial_full = full;
  const SolveResult res = solve(pc);

  const auto g = mesh.geometry(1.0);
  double measure = 0.0;
  for (double L : g.elem_len) measure += L;
  const auto [cc, cslack] = pc.op.coercivity_constants(true, measure);
  const double cw = mesh.flow().field().divergence_sup;
  const double rho = 2.0 - std::exp(cw * pc.tau());
  REQUIRE(rho > 0.0);
  // f = 0:  |U_k|^2_{M_k} + 2 C_c sum tau |u|^p
  //           <= rho^{-k} (|U_0|^2_{M_0} + 2 c_c t_k).
  const double e0 = res.diagnostics[0].h_norm_sq;
  for (int k = 1; k <= pc.steps; ++k) {
    const double lhs =
        res.diagnostics[k].h_norm_sq + 2.0 * cc * res.diagnostics[k].xp_accum;
    const double rhs = std::pow(rho, -k) *
                       (e0 + 2.0 * cslack * res.diagnostics[k].time);
    CHECK(lhs <= rhs * (1.0 + 1e-10));
  }
}

TEST_CASE("stability ratios") {
  SUBCASE("identical initial data stay identical") {
    auto mesh = interval_mesh("dilation", 0.2, 16);
    ProblemConfig<1> pc;
    pc.mesh = &mesh;
    pc.op.kind = OperatorKind::LinearDiffusion;
    pc.space = SpaceTag::ZeroBoundary;
    pc.steps = 20;
    Vector full = Vector::Zero(17);
    for (int i = 1; i < 16; ++i)
      full[i] = std::sin(std::numbers::pi * i / 16.0);
    pc.initial_full = full;
    const auto rows = stability_experiment(pc, full, full);
    for (const auto& r : rows) CHECK(r.diff_norm == 0.0);
  }
  SUBCASE("static heat contracts") {
    auto mesh = interval_mesh("zero", 0.0, 16);
    ProblemConfig<1> pc;
    pc.mesh = &mesh;
    pc.op.kind = OperatorKind::LinearDiffusion;
    pc.space = SpaceTag::ZeroBoundary;
    pc.steps = 40;
    Vector a = Vector::Zero(17), b = Vector::Zero(17);
    for (int i = 1; i < 16; ++i) {
      a[i] = std::sin(std::numbers::pi * i / 16.0);
      b[i] = a[i] + 0.2 * std::sin(2 * std::numbers::pi * i / 16.0);
    }
    pc.initial_full = a;
    const auto rows = stability_experiment(pc, a, b);
    for (const auto& r : rows) CHECK(r.ratio <= 1.0);
  }
  SUBCASE("dilation flow with p = 3 stays under the Gronwall envelope") {
    std::vector<double> grid(201);
    for (int k = 0; k <= 200; ++k) grid[k] = k / 200.0;
    auto mesh = interval_mesh("dilation", 0.2, 24, grid);
    ProblemConfig<1> pc;
    pc.mesh = &mesh;
    pc.op.kind = OperatorKind::PLaplace;
    pc.op.p = 3.0;
    pc.op.epsilon = 1e-8;
    pc.space = SpaceTag::ZeroBoundary;
    pc.T = 1.0;
    pc.steps = 200;
    Vector a = Vector::Zero(25), b = Vector::Zero(25);
    for (int i = 1; i < 24; ++i) {
      a[i] = std::sin(std::numbers::pi * i / 24.0);
      b[i] = a[i] + 0.1 * std::sin(2 * std::numbers::pi * i / 24.0);
    }
    pc.initial_full = a;
    const auto rows = stability_experiment(pc, a, b);
    for (const auto& r : rows) CHECK(r.ratio <= 1.05);
  }
}

TEST_CASE("zero velocity reproduces the fixed-domain reference bit for bit") {
  const ManufacturedHeat mh{0.0};
  const int n = 24, steps = 30;
  std::vector<double> grid(steps + 1);
  for (int k = 0; k <= steps; ++k) grid[k] = 1.0 * k / steps;
  auto mesh = interval_mesh("zero", 0.0, n, grid);
  const auto static_mesh = mesh.frozen();

  auto make = [&](const EvolvingMesh<1>& m, OperatorKind kind, double p) {
    ProblemConfig<1> pc;
    pc.mesh = &m;
    pc.op.kind = kind;
    pc.op.p = p;
    pc.op.epsilon = kind == OperatorKind::PLaplace ? 1e-8 : 0.0;
    pc.space = SpaceTag::ZeroBoundary;
    pc.T = 1.0;
    pc.steps = steps;
    pc.forcing = [&mh](double t, const Vec<1>& x) {
      return mh.forcing(t, x(0));
    };
    Vector full(n + 1);
    for (int i = 0; i <= n; ++i)
      full[i] = mh.initial(m.reference().node_parameter[i]);
    pc.initial_full = full;
    return pc;
  };

  SUBCASE("heat") {
    const SolveResult moving = solve(make(mesh, OperatorKind::LinearDiffusion,
                                          2.0));
    const SolveResult fixed = solve(make(static_mesh,
                                         OperatorKind::LinearDiffusion, 2.0));
    for (int k = 0; k <= steps; ++k)
      CHECK((moving.trajectory[k] - fixed.trajectory[k])
                .lpNorm<Eigen::Infinity>() == 0.0);
  }
  SUBCASE("p-Laplace, p = 3") {
    const SolveResult moving = solve(make(mesh, OperatorKind::PLaplace, 3.0));
    const SolveResult fixed =
        solve(make(static_mesh, OperatorKind::PLaplace, 3.0));
    for (int k = 0; k <= steps; ++k)
      CHECK((moving.trajectory[k] - fixed.trajectory[k])
                .lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("regularization limit: solutions converge as epsilon -> 0") {
  auto mesh = interval_mesh("dilation", 0.2, 24);
  auto run = [&](double eps) {
    ProblemConfig<1> pc;
    pc.mesh = &mesh;
    pc.op.kind = OperatorKind::PLaplace;
    pc.op.p = 3.0;
    pc.op.epsilon = eps;
    pc.space = SpaceTag::ZeroBoundary;
    pc.T = 0.5;
    pc.steps = 25;
    Vector full = Vector::Zero(25);
    for (int i = 1; i < 24; ++i)
      full[i] = std::sin(std::numbers::pi * i / 24.0);
    pc.initial_full = full;
    return solve(pc).trajectory.back();
  };
  const Vector coarse = run(1e-4);
  const Vector mid = run(1e-6);
  const Vector fine = run(1e-8);
  const double gap1 = (coarse - mid).lpNorm<Eigen::Infinity>();
  const double gap2 = (mid - fine).lpNorm<Eigen::Infinity>();
  CHECK(gap2 < gap1);
  CHECK(gap2 <= 1e-8);
}

TEST_CASE("Newton stagnation raises a nonconvergence error with residual") {
  auto mesh = interval_mesh("zero", 0.0, 16);
  ProblemConfig<1> pc;
  pc.mesh = &mesh;
  pc.op.kind = OperatorKind::PLaplace;
  pc.op.p = 4.0;
  pc.op.epsilon = 1e-8;
  pc.space = SpaceTag::ZeroBoundary;
  pc.T = 1.0;
  pc.steps = 2;
  pc.newton_tol = 1e-15;
  pc.newton_max_iter = 1;
  Vector full = Vector::Zero(17);
  for (int i = 1; i < 16; ++i)
    full[i] = 8.0 * std::sin(std::numbers::pi * i / 16.0);
  pc.initial_full = full;
  try {
    (void)step(pc, project_initial(pc, full), 0);
    FAIL("expected NewtonError");
  } catch (const NewtonError& e) {
    CHECK(e.last_residual > 0.0);
  }
}

TEST_CASE("weak-derivative characterization") {
  auto make = [](const EvolvingMesh<1>& mesh, int steps,
                 const ScalarField<1>& f, const Vector& init) {
    ProblemConfig<1> pc;
    pc.mesh = &mesh;
    pc.op.kind = OperatorKind::LinearDiffusion;
    pc.space = SpaceTag::ZeroBoundary;
    pc.T = 0.5;
    pc.steps = steps;
    pc.forcing = f;
    pc.initial_full = init;
    return pc;
  };

  SUBCASE("stationary solution of the stationary problem: both sides zero") {
    auto mesh = interval_mesh("zero", 0.0, 16);
    const auto idx = mesh.reference().interior_nodes();
    const ScalarField<1> f = [](double, const Vec<1>&) { return 1.0; };
    // Steady state K u = F, fed back as initial data.
    const Matrix K = restrict_matrix(assemble_stiffness(mesh, 0.0), idx);
    const Vector F = restrict_vector(assemble_load(mesh, 0.0, f), idx);
    const Vector u_star = solve_spd(K, F, true);
    Vector full = Vector::Zero(17);
    for (std::size_t k = 0; k < idx.size(); ++k) full[idx[k]] = u_star[k];
    const double res = weak_derivative_residual(make(mesh, 20, f, full));
    CHECK(res <= 1e-10);
  }
  SUBCASE("heat on static and moving intervals: first-order consistency") {
    const ManufacturedHeat still{0.0};
    const ManufacturedHeat moving{0.2};
    for (const auto* mh : {&still, &moving}) {
      auto mesh = interval_mesh("dilation", mh->alpha, 32);
      const ScalarField<1> f = [mh](double t, const Vec<1>& x) {
        return mh->forcing(t, x(0));
      };
      Vector init(33);
      for (int i = 0; i <= 32; ++i)
        init[i] = mh->initial(mesh.reference().node_parameter[i]);
      std::vector<double> residuals;
      for (int steps : {20, 40, 80})
        residuals.push_back(
            weak_derivative_residual(make(mesh, steps, f, init)));
      const double order = std::log2(residuals[1] / residuals[2]);
      CHECK(order >= 0.8);
      CHECK(order <= 1.3);
    }
  }
}

TEST_CASE("forward mass difference matches the divergence form at order 1") {
  auto mesh = interval_mesh("dilation", 0.3, 12);
  const double t = 0.3;
  const Matrix G = assemble_divergence_form(mesh, t);
  double prev = 0.0;
  for (double tau : {0.02, 0.01, 0.005}) {
    const Matrix fd =
        (assemble_mass(mesh, t + tau) - assemble_mass(mesh, t)) / tau;
    const double res = (fd - G).lpNorm<Eigen::Infinity>();
    if (prev > 0.0) CHECK(prev / res == doctest::Approx(2.0).epsilon(0.25));
    prev = res;
  }
}

TEST_CASE("manufactured heat convergence orders") {
  const ManufacturedHeat mh{0.2};
  SUBCASE("spatial study at second order") {
    const auto rows = convergence_study_spatial(mh, 1.0, 4, 8, 8);
    const auto orders = eoc(rows);
    CHECK(orders.back() == doctest::Approx(2.0).epsilon(0.1));
  }
  SUBCASE("temporal study at first order") {
    const auto rows = convergence_study_temporal(mh, 1.0, 4, 128, 25);
    const auto orders = eoc(rows);
    CHECK(orders.back() == doctest::Approx(1.0).epsilon(0.2));
  }
  SUBCASE("zero velocity matches across code paths") {
    const ManufacturedHeat still{0.0};
    const auto rows = convergence_study_spatial(still, 1.0, 2, 8, 8);
    CHECK(rows[0].error_l2 > 0.0);
    CHECK(eoc(rows).back() == doctest::Approx(2.0).epsilon(0.15));
  }
}
