#include "efem/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <vector>

#include "efem/checks.hpp"
#include "efem/errors.hpp"
#include "efem/solver.hpp"

namespace efem {

const char* const kSubcommands[7] = {
    "check-flow", "check-lambda",  "check-transport", "check-equivalence",
    "solve",      "converge",      "stability"};

bool subcommand_exists(const std::string& name) {
  for (auto* s : kSubcommands)
    if (name == s) return true;
  return false;
}

namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  void note(std::ostream& log, const std::string& check, bool ok,
            double value) {
    std::ostringstream os;
    os.precision(6);
    os << (ok ? "PASS " : "FAIL ") << check << " " << value;
    log << os.str() << "\n";
    pass &= ok;
  }
};

std::string csv_path(const RunOptions& opt, const std::string& name) {
  fs::create_directories(*opt.out_dir);
  return (fs::path(*opt.out_dir) / name).string();
}

// Deterministic fan-out: results land by index, then merge in order.
template <typename F>
void parallel_for(int workers, int n, F&& body) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::future<void>> futures;
  std::atomic<int> next{0};
  const int lanes = std::min(workers, n);
  for (int w = 0; w < lanes; ++w)
    futures.push_back(std::async(std::launch::async, [&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    }));
  for (auto& f : futures) f.get();
}

// ---------------------------------------------------------------------------
// Scenario materialization.

template <int d>
struct Workspace {
  FlowMap<d> flow;
  std::optional<FlowMap<d>> dual;
  EvolvingMesh<d> mesh;
  PivotSpec<d> pivot;
};

template <int d>
ReferenceMesh<d> build_reference(const Scenario& sc) {
  if constexpr (d == 1)
    return build_interval_mesh(sc.a, sc.b, sc.n);
  else
    return build_circle_mesh(sc.radius, sc.n);
}

template <int d>
Workspace<d> make_workspace(const Scenario& sc) {
  FlowMap<d> flow(make_field<d>(sc.field, sc.field_params, sc.T), sc.T,
                  sc.substeps);
  std::optional<FlowMap<d>> dual;
  if (!sc.tilde_field.empty())
    dual.emplace(make_field<d>(sc.tilde_field, sc.tilde_params, sc.T), sc.T,
                 sc.substeps);
  std::vector<double> grid(sc.steps + 1);
  for (int k = 0; k <= sc.steps; ++k) grid[k] = sc.T * k / sc.steps;
  EvolvingMesh<d> mesh(build_reference<d>(sc), flow, grid);
  Workspace<d> ws{std::move(flow), std::move(dual), std::move(mesh), {}};
  ws.pivot.variant = sc.pivot;
  if (ws.dual) ws.pivot.dual_flow = &*ws.dual;
  return ws;
}

template <int d>
Vector initial_data(const Scenario& sc, const ReferenceMesh<d>& ref) {
  Vector u(ref.n_nodes());
  for (int i = 0; i < ref.n_nodes(); ++i) {
    const double p = ref.node_parameter[i];
    double hatpos;  // normalized parameter in [0,1]
    if constexpr (d == 1)
      hatpos = (p - sc.a) / (sc.b - sc.a);
    else
      hatpos = p / (2.0 * std::numbers::pi);
    if (sc.initial == "zero")
      u[i] = 0.0;
    else if (sc.initial == "one")
      u[i] = 1.0;
    else if (sc.initial == "sin")
      u[i] = (d == 1) ? std::sin(std::numbers::pi * hatpos) : std::sin(p);
    else if (sc.initial == "hat")
      u[i] = 1.0 - 2.0 * std::abs(hatpos - 0.5);
    else  // gauss
      u[i] = std::exp(-50.0 * (hatpos - 0.5) * (hatpos - 0.5));
  }
  return u;
}

template <int d>
ScalarField<d> forcing_field(const Scenario& sc) {
  if (sc.forcing == "zero") return {};
  if (sc.forcing == "one")
    return [](double, const Vec<d>&) { return 1.0; };
  // manufactured-heat (interval + dilation scenarios)
  if constexpr (d == 1) {
    ManufacturedHeat mh{sc.field_params.rate};
    return [mh](double t, const Vec<1>& x) { return mh.forcing(t, x(0)); };
  }
  throw ConfigError("manufactured-heat forcing requires interval geometry");
}

template <int d>
ProblemConfig<d> make_problem(const Scenario& sc, const Workspace<d>& ws) {
  ProblemConfig<d> pc;
  pc.mesh = &ws.mesh;
  pc.op = sc.op;
  pc.forcing = forcing_field<d>(sc);
  pc.initial_full = initial_data<d>(sc, ws.mesh.reference());
  pc.space = sc.zero_boundary() ? SpaceTag::ZeroBoundary : SpaceTag::Full;
  pc.T = sc.T;
  pc.steps = sc.steps;
  pc.newton_tol = sc.newton_tol;
  pc.newton_max_iter = sc.newton_max_iter;
  return pc;
}

Vector random_coefficients(int n, Lcg& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

// Interior evaluation times for the FD stencils (clear of 0 and T).
double oracle_time(const Scenario& sc) { return 0.4 * sc.T; }

// ---------------------------------------------------------------------------

template <int d>
int run_check_flow(const Scenario& sc, const RunOptions& opt,
                   std::ostream& log) {
  auto ws = make_workspace<d>(sc);
  const auto& ref = ws.mesh.reference();
  std::vector<Vec<d>> points;
  std::vector<Vec<d>> tangents;
  for (int e = 0; e < ref.n_elements(); e += std::max(1, ref.n_elements() / 8)) {
    points.push_back(ws.mesh.reference_quad_point(e, 0.5));
    tangents.push_back(ref.element_tangent(e));
  }
  const double t = oracle_time(sc);

  Outcome oc;
  auto var = check_variational_jacobian(ws.flow, points, t);
  var.judge_order(1.8, 2.2);
  write_check_csv(var, csv_path(opt, "flow_variational.csv"));
  oc.note(log, "check-flow-variational",
          var.pass, var.max_residual() <= 1e-12 ? 0.0 : var.order);

  auto jode = check_jacobian_ode(ws.flow, points, t, tangents);
  jode.judge_order(1.8, 2.2);
  write_check_csv(jode, csv_path(opt, "flow_jacobian_ode.csv"));
  oc.note(log, "check-flow-jacobian-ode",
          jode.pass, jode.max_residual() <= 1e-12 ? 0.0 : jode.order);

  auto rate = check_metric_rate(ws.flow, points, t, tangents);
  rate.judge_order(1.8, 2.2);
  write_check_csv(rate, csv_path(opt, "flow_metric_rate.csv"));
  oc.note(log, "check-flow-metric-rate",
          rate.pass, rate.max_residual() <= 1e-12 ? 0.0 : rate.order);

  double roundtrip = 0.0;
  for (const auto& p : points) {
    const Vec<d> x = ws.flow.state(p, t).x;
    roundtrip = std::max(roundtrip, (ws.flow.inverse(x, t) - p).norm());
  }
  const bool rt_ok = roundtrip <= 10.0 * ws.flow.tolerance();
  oc.note(log, "check-flow-roundtrip", rt_ok, roundtrip);

  return oc.pass ? 0 : 3;
}

template <int d>
int run_check_lambda(const Scenario& sc, const RunOptions& opt,
                     std::ostream& log) {
  auto ws = make_workspace<d>(sc);
  Lcg rng(opt.seed.value_or(sc.seed));
  const bool zero_bdry = sc.pivot == Pivot::Hminus1;
  const int n = zero_bdry
                    ? static_cast<int>(ws.mesh.reference().interior_nodes().size())
                    : ws.mesh.reference().n_nodes();
  const Vector u0 = random_coefficients(n, rng);
  const Vector v0 = random_coefficients(n, rng);
  auto rep = check_lambda_oracle(ws.pivot, ws.mesh, oracle_time(sc), u0, v0);
  rep.judge_order(1.8, 2.2);
  write_check_csv(rep,
                  csv_path(opt, "lambda_" + pivot_name(sc.pivot) + ".csv"));
  Outcome oc;
  oc.note(log, "check-lambda-" + pivot_name(sc.pivot), rep.pass,
          rep.max_residual() <= 1e-12 ? rep.max_residual() : rep.order);
  return oc.pass ? 0 : 3;
}

template <int d>
int run_check_transport(const Scenario& sc, const RunOptions& opt,
                        std::ostream& log) {
  auto ws = make_workspace<d>(sc);
  const bool zero_bdry = sc.pivot == Pivot::Hminus1;
  const int n = zero_bdry
                    ? static_cast<int>(ws.mesh.reference().interior_nodes().size())
                    : ws.mesh.reference().n_nodes();
  const std::uint64_t seed = opt.seed.value_or(sc.seed);
  const int trials = 5;
  std::vector<CheckReport> reps(trials);
  parallel_for(opt.workers, trials, [&](int k) {
    const auto u = random_path(n, seed + 2 * k);
    const auto v = random_path(n, seed + 2 * k + 1);
    reps[k] =
        check_transport_theorem(ws.pivot, ws.mesh, u, v, oracle_time(sc));
    reps[k].judge_order(1.8, 2.2);
  });
  Outcome oc;
  for (int k = 0; k < trials; ++k) {
    write_check_csv(reps[k],
                    csv_path(opt, "transport_" + pivot_name(sc.pivot) + "_" +
                                      std::to_string(k) + ".csv"));
    oc.note(log, "check-transport-" + pivot_name(sc.pivot) + "-" +
                     std::to_string(k),
            reps[k].pass,
            reps[k].max_residual() <= 1e-12 ? reps[k].max_residual()
                                            : reps[k].order);
  }
  return oc.pass ? 0 : 3;
}

template <int d>
int run_check_equivalence(const Scenario& sc, const RunOptions& opt,
                          std::ostream& log) {
  auto ws = make_workspace<d>(sc);
  std::vector<double> grid;
  for (int k = 0; k <= 8; ++k) grid.push_back(sc.T * k / 8);

  const NormTag norm = sc.pivot == Pivot::H1
                           ? NormTag::H1
                           : (sc.pivot == Pivot::Hminus1 ? NormTag::Hminus1
                                                         : NormTag::L2);
  const auto compat = compatibility_report(ws.mesh, norm, grid, 2.0, 5,
                                           opt.seed.value_or(sc.seed));
  const double slack = 1.0 + 1e-6;
  const bool compat_ok =
      compat.max_ratio <= compat.gronwall_bound * slack &&
      1.0 / compat.min_ratio <= compat.gronwall_bound * slack;

  const auto [fwd, inv] = pi_operator_norms(ws.pivot, ws.mesh, grid);
  const bool norms_ok = std::isfinite(fwd) && std::isfinite(inv);

  Lcg rng(opt.seed.value_or(sc.seed));
  const bool zero_bdry = sc.pivot == Pivot::Hminus1;
  const int n = zero_bdry
                    ? static_cast<int>(ws.mesh.reference().interior_nodes().size())
                    : ws.mesh.reference().n_nodes();
  double roundtrip = 0.0, consistency = 0.0;
  for (double t : grid) {
    const PiOperator op = pi_matrix(ws.pivot, ws.mesh, t);
    const Vector u = random_coefficients(n, rng);
    const Vector v = random_coefficients(n, rng);
    roundtrip = std::max(
        roundtrip, (op.inverse * (op.forward * u) - u).norm() / u.norm());
    consistency = std::max(
        consistency,
        std::abs(reference_pivot_pairing(ws.pivot, ws.mesh,
                                         (op.forward * u).eval(), v) -
                 reference_pairing(ws.pivot, ws.mesh, t, u, v)));
  }

  std::ofstream csv(csv_path(opt, "equivalence.csv"));
  csv << "# columns: compat_max_ratio, compat_min_ratio, gronwall_bound, "
         "pi_norm, pi_inverse_norm, roundtrip_rel_err, consistency_abs_err\n";
  csv.precision(16);
  csv << compat.max_ratio << "," << compat.min_ratio << ","
      << compat.gronwall_bound << "," << fwd << "," << inv << "," << roundtrip
      << "," << consistency << "\n";

  Outcome oc;
  oc.note(log, "check-equivalence-compatibility", compat_ok, compat.max_ratio);
  oc.note(log, "check-equivalence-pi-norms", norms_ok, fwd);
  oc.note(log, "check-equivalence-roundtrip", roundtrip <= 1e-10, roundtrip);
  oc.note(log, "check-equivalence-consistency", consistency <= 1e-10,
          consistency);
  return oc.pass ? 0 : 3;
}

template <int d>
int run_solve(const Scenario& sc, const RunOptions& opt, std::ostream& log) {
  auto ws = make_workspace<d>(sc);
  auto pc = make_problem<d>(sc, ws);
  const SolveResult res = solve(pc);

  std::ofstream csv(csv_path(opt, "solve.csv"));
  csv << "# columns: t, mass (1^T M u), h_norm_sq (u^T M u), xp_accum "
         "(sum tau |u|_X^p), newton_iters, mass_drift (|mass - mass0|)\n";
  csv.precision(16);
  const double mass0 = res.diagnostics[0].mass;
  double max_drift_excess = 0.0;
  int max_newton = 0;
  for (const auto& dg : res.diagnostics) {
    const double drift = std::abs(dg.mass - mass0);
    csv << dg.time << "," << dg.mass << "," << dg.h_norm_sq << ","
        << dg.xp_accum << "," << dg.newton_iters << "," << drift << "\n";
    max_newton = std::max(max_newton, dg.newton_iters);
    const int k = static_cast<int>(std::llround(dg.time / pc.tau()));
    if (k > 0)
      max_drift_excess = std::max(max_drift_excess, drift - 1e-12 * k);
  }
  Outcome oc;
  oc.note(log, "solve-newton-iterations", max_newton <= sc.newton_max_iter,
          max_newton);
  const bool conservation_applies =
      sc.forcing == "zero" && sc.geometry == "circle" && sc.op.alpha == 0.0;
  if (conservation_applies)
    oc.note(log, "solve-mass-conservation", max_drift_excess <= 0.0,
            max_drift_excess);
  return oc.pass ? 0 : 3;
}

template <int d>
int run_converge(const Scenario& sc, const RunOptions& opt,
                 std::ostream& log) {
  if constexpr (d != 1) {
    (void)opt;
    (void)log;
    throw ConfigError("converge requires interval geometry");
  } else {
    const ManufacturedHeat mh{sc.field_params.rate};
    std::vector<ConvergenceRow> spatial(4), temporal(4);
    parallel_for(opt.workers, 2, [&](int which) {
      if (which == 0)
        spatial = convergence_study_spatial(mh, sc.T, 4, 8, 8, sc.substeps);
      else
        temporal =
            convergence_study_temporal(mh, sc.T, 4, 256, 50, sc.substeps);
    });
    const auto s_eoc = eoc(spatial);
    const auto t_eoc = eoc(temporal);

    std::ofstream csv(csv_path(opt, "converge.csv"));
    csv << "# columns: study, n, steps, h, tau, error_l2, eoc\n";
    csv.precision(16);
    for (std::size_t k = 0; k < spatial.size(); ++k)
      csv << "spatial," << spatial[k].n << "," << spatial[k].steps << ","
          << spatial[k].h << "," << spatial[k].tau << ","
          << spatial[k].error_l2 << ","
          << (k > 0 ? s_eoc[k - 1] : 0.0) << "\n";
    for (std::size_t k = 0; k < temporal.size(); ++k)
      csv << "temporal," << temporal[k].n << "," << temporal[k].steps << ","
          << temporal[k].h << "," << temporal[k].tau << ","
          << temporal[k].error_l2 << ","
          << (k > 0 ? t_eoc[k - 1] : 0.0) << "\n";

    Outcome oc;
    oc.note(log, "converge-spatial-eoc",
            s_eoc.back() >= 1.8 && s_eoc.back() <= 2.2, s_eoc.back());
    oc.note(log, "converge-temporal-eoc",
            t_eoc.back() >= 0.8 && t_eoc.back() <= 1.2, t_eoc.back());
    return oc.pass ? 0 : 3;
  }
}

template <int d>
int run_stability(const Scenario& sc, const RunOptions& opt,
                  std::ostream& log) {
  auto ws = make_workspace<d>(sc);
  auto pc = make_problem<d>(sc, ws);
  const auto& ref = ws.mesh.reference();
  const Vector u0a = initial_data<d>(sc, ref);
  Vector u0b = u0a;
  for (int i = 0; i < ref.n_nodes(); ++i) {
    const double p = ref.node_parameter[i];
    double hatpos;
    if constexpr (d == 1)
      hatpos = (p - sc.a) / (sc.b - sc.a);
    else
      hatpos = p / (2.0 * std::numbers::pi);
    u0b[i] += 0.1 * std::sin(2.0 * std::numbers::pi * hatpos) *
              (d == 1 ? std::sin(std::numbers::pi * hatpos) : 1.0);
  }
  const auto rows = stability_experiment(pc, u0a, u0b);

  std::ofstream csv(csv_path(opt, "stability.csv"));
  csv << "# columns: k, t, diff_norm (H(t) norm of u1-u2), bound "
         "(exp(C_w t/2) initial diff), ratio\n";
  csv.precision(16);
  double worst = 0.0;
  for (const auto& r : rows) {
    csv << r.k << "," << r.time << "," << r.diff_norm << "," << r.bound << ","
        << r.ratio << "\n";
    worst = std::max(worst, r.ratio);
  }
  const bool is_static = ws.flow.field().divergence_sup == 0.0;
  const double threshold = is_static ? 1.0 : 1.05;
  Outcome oc;
  oc.note(log, "stability-ratio", worst <= threshold, worst);
  return oc.pass ? 0 : 3;
}

template <int d>
int dispatch(const std::string& name, const Scenario& sc,
             const RunOptions& opt, std::ostream& log) {
  if (name == "check-flow") return run_check_flow<d>(sc, opt, log);
  if (name == "check-lambda") return run_check_lambda<d>(sc, opt, log);
  if (name == "check-transport") return run_check_transport<d>(sc, opt, log);
  if (name == "check-equivalence")
    return run_check_equivalence<d>(sc, opt, log);
  if (name == "solve") return run_solve<d>(sc, opt, log);
  if (name == "converge") return run_converge<d>(sc, opt, log);
  if (name == "stability") return run_stability<d>(sc, opt, log);
  throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace

int run_subcommand(const std::string& name, const Scenario& scenario,
                   const RunOptions& options, std::ostream& log) {
  RunOptions resolved = options;
  if (!resolved.out_dir) resolved.out_dir = scenario.out_dir;
  if (resolved.workers <= 0) resolved.workers = scenario.workers;
  if (scenario.dim() == 1) return dispatch<1>(name, scenario, resolved, log);
  return dispatch<2>(name, scenario, resolved, log);
}

}  // namespace efem
