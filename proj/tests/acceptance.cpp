// Acceptance suite: nine gate criteria, one PASS/FAIL line each, exit code
// equal to the number of failures.
//
//  1. lambda-oracle identity per pivot and catalog field (order 2, or
//     residuals at the roundoff floor), under 30 s
//  2. transport theorem on 5 seeded random trajectories per pivot (order 2)
//  3. geometry identities: Jacobian ODE and metric-rate orders, gradient
//     pullback at n = 256, flow round trips
//  4. Pi operators: round trip, pairing consistency, dilation constant,
//     finite norms
//  5. mass conservation on the expanding circle over 500 steps
//  6. manufactured-heat EOCs (spatial 2, temporal 1), under 2 min
//  7. perturbation stability against the Gronwall envelope
//  8. monotonicity/coercivity witnesses and the Newton iteration budget
//  9. zero-velocity reduction to the fixed-domain path, bit for bit
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "efem/checks.hpp"
#include "efem/field_catalog.hpp"
#include "efem/solver.hpp"

using namespace efem;

namespace {

int failures = 0;

void report(int criterion, const char* name, bool pass, const char* fmt,
            double value) {
  std::printf("%s [%d] %s: ", pass ? "PASS" : "FAIL", criterion, name);
  std::printf(fmt, value);
  std::printf("\n");
  if (!pass) ++failures;
}

Vector random_vec(int n, std::uint64_t seed) {
  Lcg rng(seed);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

struct Field1d {
  const char* name;
  FieldParams params;
};

std::vector<Field1d> interval_fields() {
  std::vector<Field1d> fields;
  fields.push_back({"zero", {}});
  {
    FieldParams fp;
    fp.speed = 0.3;
    fields.push_back({"translation", fp});
  }
  {
    FieldParams fp;
    fp.rate = 0.25;
    fields.push_back({"dilation", fp});
  }
  {
    FieldParams fp;
    fp.coefficients = {0.2, 0.1, -0.05};
    fields.push_back({"user-polynomial", fp});
  }
  return fields;
}

std::vector<Field1d> circle_fields() {
  std::vector<Field1d> fields;
  fields.push_back({"zero", {}});
  {
    FieldParams fp;
    fp.speed = 0.3;
    fields.push_back({"translation", fp});
  }
  {
    FieldParams fp;
    fp.rate = 0.2;
    fields.push_back({"dilation", fp});
  }
  {
    FieldParams fp;
    fp.amplitude = 0.25;
    fp.frequency = 1.5;
    fields.push_back({"radial-circle", fp});
  }
  {
    FieldParams fp;
    fp.rate = 0.15;
    fp.omega = 0.7;
    fields.push_back({"rotating-circle", fp});
  }
  return fields;
}

EvolvingMesh<1> interval_mesh(const Field1d& f, int n, int substeps = 64,
                              std::vector<double> grid = {}) {
  return EvolvingMesh<1>(
      build_interval_mesh(0.0, 1.0, n),
      FlowMap<1>(make_field<1>(f.name, f.params, 1.0), 1.0, substeps),
      std::move(grid));
}

EvolvingMesh<2> circle_mesh(const Field1d& f, int n, int substeps = 64,
                            std::vector<double> grid = {}) {
  return EvolvingMesh<2>(
      build_circle_mesh(1.0, n),
      FlowMap<2>(make_field<2>(f.name, f.params, 1.0), 1.0, substeps),
      std::move(grid));
}

std::vector<double> uniform_grid(int steps, double T = 1.0) {
  std::vector<double> g(steps + 1);
  for (int k = 0; k <= steps; ++k) g[k] = T * k / steps;
  return g;
}

// Worst (order, floor) outcome tracker: a case passes if its order lands in
// [1.8, 2.2] or the residuals sit below the stated floor.
struct OrderGate {
  bool pass = true;
  double worst_order_gap = 0.0;
  void add(CheckReport rep, double floor = 1e-12) {
    rep.judge_order(1.8, 2.2, floor);
    pass &= rep.pass;
    if (rep.max_residual() > floor)
      worst_order_gap = std::max(worst_order_gap, std::abs(rep.order - 2.0));
  }
};

// --- criterion 1 -----------------------------------------------------------

void criterion_lambda() {
  const auto t0 = std::chrono::steady_clock::now();
  OrderGate gate;
  const double t = 0.4;
  int cases = 0;

  for (const auto& f : interval_fields()) {
    for (Pivot p : {Pivot::L2, Pivot::H1, Pivot::Hminus1}) {
      auto mesh = interval_mesh(f, 64);
      PivotSpec<1> pivot{p, nullptr};
      const int n = p == Pivot::Hminus1 ? 63 : 65;
      gate.add(check_lambda_oracle(pivot, mesh, t, random_vec(n, 11 + cases),
                                   random_vec(n, 12 + cases)));
      ++cases;
    }
  }
  for (const auto& f : circle_fields()) {
    for (Pivot p : {Pivot::L2, Pivot::H1}) {
      auto mesh = circle_mesh(f, 64);
      PivotSpec<2> pivot{p, nullptr};
      gate.add(check_lambda_oracle(pivot, mesh, t, random_vec(64, 21 + cases),
                                   random_vec(64, 22 + cases)));
      ++cases;
    }
  }
  // Dual-flow pairs share the normal speed; their reparametrizations are
  // rigid rotations, so the pairing is piecewise linear in t and the match
  // is exact to the integrator floor (256 substeps put it below 1e-12).
  {
    FieldParams still;
    FieldParams rot;
    rot.rate = 0.0;
    rot.omega = 0.7;
    auto mesh = circle_mesh({"zero", still}, 64, 256);
    FlowMap<2> dual(make_field<2>("rotating-circle", rot, 1.0), 1.0, 256);
    PivotSpec<2> pivot{Pivot::DualFlowL1, &dual};
    gate.add(check_lambda_oracle(pivot, mesh, t, random_vec(64, 91),
                                 random_vec(64, 92)));
    ++cases;
  }
  {
    FieldParams radial;
    radial.rate = 0.15;
    FieldParams rot = radial;
    rot.omega = 0.7;
    auto mesh = circle_mesh({"dilation", radial}, 64, 256);
    FlowMap<2> dual(make_field<2>("rotating-circle", rot, 1.0), 1.0, 256);
    PivotSpec<2> pivot{Pivot::DualFlowL1, &dual};
    gate.add(check_lambda_oracle(pivot, mesh, t, random_vec(64, 93),
                                 random_vec(64, 94)));
    ++cases;
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const bool pass = gate.pass && secs < 30.0;
  std::printf("%s [1] lambda-oracle: %d cases, worst |order-2| %.3f, %.1f s\n",
              pass ? "PASS" : "FAIL", cases, gate.worst_order_gap, secs);
  if (!pass) ++failures;
}

// --- criterion 2 -----------------------------------------------------------

void criterion_transport() {
  OrderGate gate;
  const double t = 0.4;

  {
    FieldParams fp;
    fp.amplitude = 0.25;
    fp.frequency = 1.5;
    auto mesh = circle_mesh({"radial-circle", fp}, 48);
    PivotSpec<2> pivot{Pivot::L2, nullptr};
    for (int k = 0; k < 5; ++k)
      gate.add(check_transport_theorem(pivot, mesh, random_path(48, 500 + 2 * k),
                                       random_path(48, 501 + 2 * k), t));
  }
  {
    FieldParams fp;
    fp.rate = 0.25;
    auto mesh = interval_mesh({"dilation", fp}, 32);
    PivotSpec<1> pivot{Pivot::H1, nullptr};
    for (int k = 0; k < 5; ++k)
      gate.add(check_transport_theorem(pivot, mesh, random_path(33, 520 + 2 * k),
                                       random_path(33, 521 + 2 * k), t));
  }
  {
    FieldParams fp;
    fp.rate = 0.25;
    auto mesh = interval_mesh({"dilation", fp}, 24);
    PivotSpec<1> pivot{Pivot::Hminus1, nullptr};
    for (int k = 0; k < 5; ++k)
      gate.add(check_transport_theorem(pivot, mesh, random_path(23, 540 + 2 * k),
                                       random_path(23, 541 + 2 * k), t));
  }
  {
    FieldParams radial;
    radial.rate = 0.15;
    FieldParams rot = radial;
    rot.omega = 0.7;
    auto mesh = circle_mesh({"dilation", radial}, 64, 128);
    FlowMap<2> dual(make_field<2>("rotating-circle", rot, 1.0), 1.0, 128);
    PivotSpec<2> pivot{Pivot::DualFlowL1, &dual};
    for (int k = 0; k < 5; ++k)
      gate.add(check_transport_theorem(pivot, mesh, random_path(64, 560 + 2 * k),
                                       random_path(64, 561 + 2 * k), t));
  }
  report(2, "transport-theorem", gate.pass, "worst |order-2| %.3f",
         gate.worst_order_gap);
}

// --- criterion 3 -----------------------------------------------------------

void criterion_geometry() {
  OrderGate gate;
  const double t = 0.4;
  std::vector<Vec<2>> cpts;
  std::vector<Vec<2>> ctaus;
  for (double th : {0.2, 1.4, 2.9, 4.4}) {
    cpts.emplace_back(std::cos(th), std::sin(th));
    ctaus.emplace_back(-std::sin(th), std::cos(th));
  }
  std::vector<Vec<1>> ipts = {Vec<1>::Constant(0.3), Vec<1>::Constant(0.7)};

  {
    FieldParams fp;
    fp.rate = 0.25;
    FlowMap<1> flow(make_field<1>("dilation", fp, 1.0), 1.0, 64);
    gate.add(check_jacobian_ode(flow, ipts, t));
    gate.add(check_metric_rate(flow, ipts, t));
  }
  {
    FieldParams fp;
    fp.coefficients = {0.2, 0.1, -0.05};
    FlowMap<1> flow(make_field<1>("user-polynomial", fp, 1.0), 1.0, 64);
    gate.add(check_jacobian_ode(flow, ipts, t));
    gate.add(check_metric_rate(flow, ipts, t));
  }
  {
    FieldParams fp;
    fp.amplitude = 0.25;
    fp.frequency = 1.5;
    FlowMap<2> flow(make_field<2>("radial-circle", fp, 1.0), 1.0, 64);
    gate.add(check_jacobian_ode(flow, cpts, t, ctaus));
    gate.add(check_metric_rate(flow, cpts, t, ctaus));
  }
  {
    FieldParams fp;
    fp.rate = 0.15;
    fp.omega = 0.7;
    FlowMap<2> flow(make_field<2>("rotating-circle", fp, 1.0), 1.0, 64);
    gate.add(check_jacobian_ode(flow, cpts, t, ctaus));
    gate.add(check_metric_rate(flow, cpts, t, ctaus));
  }

  double pullback_worst = 0.0;
  {
    FieldParams fp;
    fp.rate = 0.15;
    fp.omega = 0.7;
    auto mesh = circle_mesh({"rotating-circle", fp}, 256);
    pullback_worst =
        std::max(pullback_worst,
                 check_gradient_pullback(mesh, random_vec(256, 61), 0.6)
                     .max_residual());
  }
  {
    FieldParams fp;
    fp.rate = 0.25;
    auto mesh = interval_mesh({"dilation", fp}, 256);
    pullback_worst =
        std::max(pullback_worst,
                 check_gradient_pullback(mesh, random_vec(257, 62), 0.6)
                     .max_residual());
  }

  double roundtrip_excess = 0.0;
  for (const auto& f : circle_fields()) {
    FlowMap<2> flow(make_field<2>(f.name, f.params, 1.0), 1.0, 64);
    for (const auto& p : cpts)
      for (double tt : {0.3, 0.8}) {
        const Vec<2> x = flow.state(p, tt).x;
        roundtrip_excess =
            std::max(roundtrip_excess, (flow.inverse(x, tt) - p).norm() -
                                           10.0 * flow.tolerance());
      }
  }

  const bool pass =
      gate.pass && pullback_worst <= 1e-8 && roundtrip_excess <= 0.0;
  std::printf(
      "%s [3] geometry: worst |order-2| %.3f, pullback %.2e, roundtrip "
      "excess %.2e\n",
      pass ? "PASS" : "FAIL", gate.worst_order_gap, pullback_worst,
      roundtrip_excess);
  if (!pass) ++failures;
}

// --- criterion 4 -----------------------------------------------------------

void criterion_pi() {
  double roundtrip = 0.0, consistency = 0.0, constant_err = 0.0;
  double worst_norm = 0.0;
  const std::vector<double> times = {0.25, 0.5, 0.75, 1.0};

  auto probe = [&](auto& mesh, auto pivot, int n, std::uint64_t seed) {
    for (double t : times) {
      const PiOperator op = pi_matrix(pivot, mesh, t);
      const Vector u = random_vec(n, seed);
      const Vector v = random_vec(n, seed + 1);
      roundtrip = std::max(
          roundtrip,
          (op.inverse * (op.forward * u) - u).lpNorm<Eigen::Infinity>());
      consistency = std::max(
          consistency,
          std::abs(reference_pivot_pairing(pivot, mesh,
                                           (op.forward * u).eval(), v) -
                   reference_pairing(pivot, mesh, t, u, v)));
    }
    const auto [fwd, inv] = pi_operator_norms(pivot, mesh, times);
    if (!std::isfinite(fwd) || !std::isfinite(inv))
      worst_norm = std::numeric_limits<double>::infinity();
    else
      worst_norm = std::max({worst_norm, fwd, inv});
  };

  {
    FieldParams fp;
    fp.rate = 0.25;
    auto mesh = interval_mesh({"dilation", fp}, 48);
    probe(mesh, PivotSpec<1>{Pivot::L2, nullptr}, 49, 71);
    probe(mesh, PivotSpec<1>{Pivot::H1, nullptr}, 49, 73);
    probe(mesh, PivotSpec<1>{Pivot::Hminus1, nullptr}, 47, 75);
  }
  {
    FieldParams radial;
    radial.rate = 0.15;
    FieldParams rot = radial;
    rot.omega = 0.7;
    auto mesh = circle_mesh({"dilation", radial}, 48);
    FlowMap<2> dual(make_field<2>("rotating-circle", rot, 1.0), 1.0, 64);
    PivotSpec<2> pivot{Pivot::DualFlowL1, &dual};
    probe(mesh, pivot, 48, 77);
  }
  {
    // The dilation L2 projection of the constant function is e^{at}.
    FieldParams fp;
    fp.rate = 0.1;
    auto mesh = interval_mesh({"dilation", fp}, 48);
    PivotSpec<1> pivot{Pivot::L2, nullptr};
    for (double t : times) {
      const PiOperator op = pi_matrix(pivot, mesh, t);
      const Vector image = op.forward * Vector::Ones(49);
      constant_err = std::max(
          constant_err,
          (image.array() - std::exp(0.1 * t)).abs().maxCoeff());
    }
  }

  const bool pass = roundtrip <= 1e-10 && consistency <= 1e-10 &&
                    constant_err <= 1e-10 && std::isfinite(worst_norm);
  std::printf(
      "%s [4] pi-operators: roundtrip %.2e, consistency %.2e, dilation "
      "constant %.2e, max norm %.3g\n",
      pass ? "PASS" : "FAIL", roundtrip, consistency, constant_err,
      worst_norm);
  if (!pass) ++failures;
}

// --- criterion 5 -----------------------------------------------------------

int max_newton_iters = 0;

void track_newton(const SolveResult& res) {
  for (const auto& dg : res.diagnostics)
    max_newton_iters = std::max(max_newton_iters, dg.newton_iters);
}

void criterion_conservation() {
  const int steps = 500;
  FieldParams fp;
  fp.rate = 0.15;
  auto mesh = circle_mesh({"dilation", fp}, 96, 64, uniform_grid(steps));
  ProblemConfig<2> pc;
  pc.mesh = &mesh;
  pc.op.kind = OperatorKind::LinearDiffusion;
  pc.space = SpaceTag::Full;
  pc.T = 1.0;
  pc.steps = steps;
  Vector u0(96);
  for (int i = 0; i < 96; ++i)
    u0[i] = 1.0 + 0.5 * std::sin(mesh.reference().node_parameter[i]);
  pc.initial_full = u0;
  const SolveResult res = solve(pc);
  track_newton(res);
  double excess = -1.0;
  const double mass0 = res.diagnostics[0].mass;
  for (int k = 1; k <= steps; ++k)
    excess = std::max(excess,
                      std::abs(res.diagnostics[k].mass - mass0) - 1e-12 * k);
  report(5, "mass-conservation", excess <= 0.0, "max drift excess %.2e",
         excess);
}

// --- criterion 6 -----------------------------------------------------------

void criterion_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const ManufacturedHeat mh{0.2};
  const auto spatial = convergence_study_spatial(mh, 1.0, 4, 8, 8);
  const auto temporal = convergence_study_temporal(mh, 1.0, 4, 256, 50);
  const double s = eoc(spatial).back();
  const double te = eoc(temporal).back();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const bool pass = s >= 1.8 && s <= 2.2 && te >= 0.8 && te <= 1.2 &&
                    secs < 120.0;
  std::printf("%s [6] convergence: spatial EOC %.3f, temporal EOC %.3f, "
              "%.1f s\n",
              pass ? "PASS" : "FAIL", s, te, secs);
  if (!pass) ++failures;
}

// --- criterion 7 -----------------------------------------------------------

void criterion_stability() {
  double worst_moving = 0.0, worst_static = 0.0;

  auto perturbed = [](const EvolvingMesh<1>& mesh) {
    const int n = mesh.reference().n_nodes();
    Vector a = Vector::Zero(n), b = Vector::Zero(n);
    for (int i = 1; i < n - 1; ++i) {
      const double x = mesh.reference().node_parameter[i];
      a[i] = std::sin(std::numbers::pi * x);
      b[i] = a[i] + 0.1 * std::sin(2.0 * std::numbers::pi * x);
    }
    return std::pair(a, b);
  };

  auto run = [&](const char* field, double rate, OperatorKind kind, double p,
                 double& worst) {
    FieldParams fp;
    fp.rate = rate;
    auto mesh = interval_mesh({field, fp}, 48, 64, uniform_grid(200));
    ProblemConfig<1> pc;
    pc.mesh = &mesh;
    pc.op.kind = kind;
    pc.op.p = p;
    pc.op.epsilon = kind == OperatorKind::PLaplace ? 1e-8 : 0.0;
    pc.space = SpaceTag::ZeroBoundary;
    pc.T = 1.0;
    pc.steps = 200;  // tau = T/200
    const auto [a, b] = perturbed(mesh);
    pc.initial_full = a;
    for (const auto& row : stability_experiment(pc, a, b))
      worst = std::max(worst, row.ratio);
  };

  run("dilation", 0.2, OperatorKind::LinearDiffusion, 2.0, worst_moving);
  run("dilation", 0.2, OperatorKind::PLaplace, 3.0, worst_moving);
  run("zero", 0.0, OperatorKind::LinearDiffusion, 2.0, worst_static);
  run("zero", 0.0, OperatorKind::PLaplace, 3.0, worst_static);

  const bool pass = worst_moving <= 1.05 && worst_static <= 1.0;
  std::printf("%s [7] stability: moving ratio %.4f (<= 1.05), static ratio "
              "%.4f (<= 1)\n",
              pass ? "PASS" : "FAIL", worst_moving, worst_static);
  if (!pass) ++failures;
}

// --- criterion 8 -----------------------------------------------------------

void criterion_witnesses() {
  double worst_mono = 0.0;
  double worst_coercive = 0.0;
  FieldParams fp;
  fp.rate = 0.2;
  auto mesh = interval_mesh({"dilation", fp}, 32);
  const auto g = mesh.geometry(0.5);
  double measure = 0.0;
  for (double L : g.elem_len) measure += L;

  // Smooth unit-scale samples in the zero-boundary space; the +-1e-12 slack
  // of the criterion is an absolute bound and only meaningful when the
  // tested quantities are O(1).
  auto smooth_sample = [&](Lcg& rng) {
    Vector u = Vector::Zero(33);
    for (int k = 1; k <= 3; ++k) {
      const double a = rng.uniform(-0.5, 0.5) / k;
      for (int i = 1; i < 32; ++i)
        u[i] += a * std::sin(k * std::numbers::pi *
                             mesh.reference().node_parameter[i]);
    }
    return u;
  };

  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    OperatorSpec op;
    op.kind = OperatorKind::PLaplace;
    op.p = p;
    op.epsilon = 1e-8;
    const auto [cc, cslack] = op.coercivity_constants(true, measure);
    Lcg rng(4321);
    for (int trial = 0; trial < 100; ++trial) {
      const Vector u = smooth_sample(rng);
      const Vector v = smooth_sample(rng);
      const double gap = (nonlinear_residual(op, mesh, 0.5, u) -
                          nonlinear_residual(op, mesh, 0.5, v))
                             .dot(u - v);
      worst_mono = std::min(worst_mono, gap);
      const double slack = nonlinear_residual(op, mesh, 0.5, u).dot(u) -
                           (cc * xnorm_p(op, mesh, 0.5, u, true) - cslack);
      worst_coercive = std::min(worst_coercive, slack);
    }
  }

  const bool pass = worst_mono >= -1e-12 && worst_coercive >= -1e-12 &&
                    max_newton_iters <= 25;
  std::printf("%s [8] monotone-witnesses: monotonicity slack %.2e, "
              "coercivity slack %.2e, max Newton %d\n",
              pass ? "PASS" : "FAIL", worst_mono, worst_coercive,
              max_newton_iters);
  if (!pass) ++failures;
}

// --- criterion 9 -----------------------------------------------------------

void criterion_reduction() {
  const ManufacturedHeat mh{0.0};
  const int n = 32, steps = 40;
  auto mesh = interval_mesh({"zero", {}}, n, 64, uniform_grid(steps));
  const auto fixed_mesh = mesh.frozen();

  double worst = 0.0;
  for (OperatorKind kind :
       {OperatorKind::LinearDiffusion, OperatorKind::PLaplace}) {
    auto make = [&](const EvolvingMesh<1>& m) {
      ProblemConfig<1> pc;
      pc.mesh = &m;
      pc.op.kind = kind;
      pc.op.p = kind == OperatorKind::PLaplace ? 3.0 : 2.0;
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
    const SolveResult moving = solve(make(mesh));
    const SolveResult fixed = solve(make(fixed_mesh));
    track_newton(moving);
    for (int k = 0; k <= steps; ++k)
      worst = std::max(worst, (moving.trajectory[k] - fixed.trajectory[k])
                                  .lpNorm<Eigen::Infinity>());
  }
  report(9, "zero-velocity-reduction", worst == 0.0,
         "max coefficient deviation %.1e", worst);
}

}  // namespace

int main() {
  criterion_lambda();
  criterion_transport();
  criterion_geometry();
  criterion_pi();
  criterion_conservation();
  criterion_convergence();
  criterion_stability();
  criterion_witnesses();
  criterion_reduction();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
