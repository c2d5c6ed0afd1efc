#include "efem/checks.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "efem/errors.hpp"

namespace efem {

double CheckReport::max_residual() const {
  double m = 0.0;
  for (double r : residual) m = std::max(m, r);
  return m;
}

void CheckReport::judge_order(double lo, double hi, double floor) {
  tolerance = hi;
  if (max_residual() <= floor) {
    pass = true;
    order = 0.0;
    return;
  }
  const std::size_t n = residual.size();
  order = (n >= 2 && residual[n - 1] > 0.0)
              ? std::log2(residual[n - 2] / residual[n - 1])
              : 0.0;
  pass = order >= lo && order <= hi;
}

void CheckReport::judge_residual(double tol) {
  tolerance = tol;
  const std::size_t n = residual.size();
  order = (n >= 2 && residual[n - 1] > 0.0)
              ? std::log2(residual[n - 2] / residual[n - 1])
              : 0.0;
  pass = max_residual() <= tol;
}

std::string CheckReport::csv() const {
  std::ostringstream os;
  os << "# check: " << name << "\n";
  os << "# columns: h (fd step, time units), residual (abs), order (log2 "
        "ratio to next level)\n";
  os.precision(16);
  for (std::size_t k = 0; k < h.size(); ++k) {
    double ord = 0.0;
    if (k + 1 < h.size() && residual[k + 1] > 0.0)
      ord = std::log2(residual[k] / residual[k + 1]);
    os << h[k] << "," << residual[k] << "," << ord << "\n";
  }
  return os.str();
}

void write_check_csv(const CheckReport& report, const std::string& path) {
  std::ofstream out(path);
  out << report.csv();
}

std::vector<double> default_fd_steps() { return {1e-2, 5e-3, 2.5e-3}; }

CoefficientPath random_path(int n_nodes, std::uint64_t seed) {
  Lcg rng(seed);
  // c_j(t) = a_j + b_j sin(w_j t + p_j): smooth, bounded, analytic rate.
  std::vector<double> a(n_nodes), b(n_nodes), w(n_nodes), ph(n_nodes);
  for (int j = 0; j < n_nodes; ++j) {
    a[j] = rng.uniform(-1.0, 1.0);
    b[j] = rng.uniform(-1.0, 1.0);
    w[j] = rng.uniform(0.5, 2.0);
    ph[j] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  CoefficientPath path;
  path.value = [=](double t) {
    Vector c(n_nodes);
    for (int j = 0; j < n_nodes; ++j)
      c[j] = a[j] + b[j] * std::sin(w[j] * t + ph[j]);
    return c;
  };
  path.derivative = [=](double t) {
    Vector c(n_nodes);
    for (int j = 0; j < n_nodes; ++j)
      c[j] = b[j] * w[j] * std::cos(w[j] * t + ph[j]);
    return c;
  };
  return path;
}

namespace {

// Central-difference sweep of a scalar map against a reference value.
CheckReport fd_sweep(const std::string& name,
                     const std::function<double(double)>& f, double t,
                     double reference) {
  CheckReport rep;
  rep.name = name;
  rep.h = default_fd_steps();
  for (double h : rep.h) {
    const double fd = (f(t + h) - f(t - h)) / (2.0 * h);
    rep.residual.push_back(std::abs(fd - reference));
  }
  return rep;
}

template <int d>
std::vector<Vec<d>> default_tangents(const std::vector<Vec<d>>& points,
                                     const std::vector<Vec<d>>& tangents) {
  if (!tangents.empty()) return tangents;
  std::vector<Vec<d>> taus(points.size(), Vec<d>::UnitX());
  if constexpr (d == 2) {
    // Circle convention: tangent orthogonal to the radial direction.
    for (std::size_t k = 0; k < points.size(); ++k) {
      const Vec<2> nu = points[k].normalized();
      taus[k] = Vec<2>(-nu.y(), nu.x());
    }
  }
  return taus;
}

}  // namespace

template <int d>
CheckReport check_jacobian_ode(const FlowMap<d>& flow,
                               const std::vector<Vec<d>>& points, double t,
                               const std::vector<Vec<d>>& tangents) {
  const auto taus = default_tangents<d>(points, tangents);
  CheckReport rep;
  rep.name = "jacobian-ode";
  rep.h = default_fd_steps();
  for (double h : rep.h) {
    double worst = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto sample = [&](double s) {
        return flow.sample(points[k], s, taus[k]).jdet;
      };
      const GeometrySample<d> g = flow.sample(points[k], t, taus[k]);
      double div;
      if constexpr (d == 1) {
        div = flow.field().divergence(t, g.position);
      } else {
        const Vec<d> tau_t = (g.jac * taus[k]).normalized();
        div = tau_t.dot(flow.field().jacobian(t, g.position) * tau_t);
      }
      const double fd = (sample(t + h) - sample(t - h)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - div * g.jdet));
    }
    rep.residual.push_back(worst);
  }
  return rep;
}

template <int d>
CheckReport check_metric_rate(const FlowMap<d>& flow,
                              const std::vector<Vec<d>>& points, double t,
                              const std::vector<Vec<d>>& tangents) {
  const auto taus = default_tangents<d>(points, tangents);
  CheckReport rep;
  rep.name = "metric-rate";
  rep.h = default_fd_steps();
  // B(t) = J DPhi^{-1} DPhi^{-T} (flat), J^{-1} tau0 tau0^T (curve).
  const auto bmat = [&](std::size_t k, double s) -> Mat<d> {
    const FlowState<d> st = flow.state(points[k], s);
    if constexpr (d == 1) {
      const Mat<d> inv = st.jac.inverse();
      return std::abs(st.jac(0, 0)) * inv * inv.transpose();
    } else {
      const Vec<d> tau = taus[k];
      const double stretch = (st.jac * tau).norm();
      return (1.0 / stretch) * (tau * tau.transpose());
    }
  };
  for (double h : rep.h) {
    double worst = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
      const Mat<d> fd = (bmat(k, t + h) - bmat(k, t - h)) / (2.0 * h);
      const Mat<d> rate = metric_time_derivative(flow, points[k], t, taus[k]);
      worst = std::max(worst, (fd - rate).template lpNorm<Eigen::Infinity>());
    }
    rep.residual.push_back(worst);
  }
  return rep;
}

template <int d>
CheckReport check_variational_jacobian(const FlowMap<d>& flow,
                                       const std::vector<Vec<d>>& points,
                                       double t) {
  CheckReport rep;
  rep.name = "variational-jacobian";
  rep.h = default_fd_steps();
  for (double h : rep.h) {
    double worst = 0.0;
    for (const auto& p : points) {
      const Mat<d> jac = flow.state(p, t).jac;
      for (int c = 0; c < d; ++c) {
        Vec<d> dp = Vec<d>::Zero();
        dp(c) = h;
        const Vec<d> fd =
            (flow.state(p + dp, t).x - flow.state(p - dp, t).x) / (2.0 * h);
        worst = std::max(worst, (fd - jac.col(c)).template lpNorm<Eigen::Infinity>());
      }
    }
    rep.residual.push_back(worst);
  }
  return rep;
}

template <int d>
CheckReport check_gradient_pullback(const EvolvingMesh<d>& mesh,
                                    const Vector& full_u, double t) {
  const auto& ref = mesh.reference();
  const PushedGeometry<d> g = mesh.geometry(t);
  CheckReport rep;
  rep.name = "gradient-pullback";
  rep.h = {0.0};
  double worst = 0.0;
  for (int e = 0; e < ref.n_elements(); ++e) {
    const auto [i, j] = ref.elements[e];
    const double L0 = ref.element_length(e);
    const double du = full_u[j] - full_u[i];
    // Reference-side gradient of the pullback.
    const Vec<d> lhs = (du / L0) * ref.element_tangent(e);
    // (D_g0 Phi)^T applied to the pushed chord gradient: the discrete
    // tangential Jacobian maps tau0 to chord/L0.
    const Vec<d> chord = g.position[j] - g.position[i];
    const Vec<d> grad_t = (du / g.elem_len[e]) * g.elem_tangent[e];
    const Vec<d> rhs = ref.element_tangent(e) * (chord.dot(grad_t) / L0);
    worst = std::max(worst, (lhs - rhs).template lpNorm<Eigen::Infinity>());
  }
  rep.residual.push_back(worst);
  return rep;
}

template <int d>
CheckReport check_lambda_oracle(const PivotSpec<d>& pivot,
                                const EvolvingMesh<d>& mesh, double t,
                                const Vector& u0, const Vector& v0) {
  const double lambda = lambda_form_transported(pivot, mesh, t, u0, v0);
  auto rep = fd_sweep(
      "lambda-oracle-" + pivot_name(pivot.variant),
      [&](double s) { return reference_pairing(pivot, mesh, s, u0, v0); }, t,
      lambda);
  return rep;
}

template <int d>
CheckReport check_transport_theorem(const PivotSpec<d>& pivot,
                                    const EvolvingMesh<d>& mesh,
                                    const CoefficientPath& u,
                                    const CoefficientPath& v, double t) {
  const Vector ut = u.value(t), vt = v.value(t);
  const Vector dut = u.derivative(t), dvt = v.derivative(t);
  const double rhs = reference_pairing(pivot, mesh, t, dut, vt) +
                     reference_pairing(pivot, mesh, t, ut, dvt) +
                     lambda_form_transported(pivot, mesh, t, ut, vt);
  auto rep = fd_sweep(
      "transport-" + pivot_name(pivot.variant),
      [&](double s) {
        return reference_pairing(pivot, mesh, s, u.value(s), v.value(s));
      },
      t, rhs);
  return rep;
}

CheckReport check_weak_derivative_characterization(
    const WeakDerivativeCheckInput& input) {
  CheckReport rep;
  rep.name = "weak-derivative-characterization";
  rep.h = input.taus;
  for (double tau : input.taus) rep.residual.push_back(input.residual(tau));
  return rep;
}

template CheckReport check_jacobian_ode<1>(const FlowMap<1>&,
                                           const std::vector<Vec<1>>&, double,
                                           const std::vector<Vec<1>>&);
template CheckReport check_jacobian_ode<2>(const FlowMap<2>&,
                                           const std::vector<Vec<2>>&, double,
                                           const std::vector<Vec<2>>&);
template CheckReport check_metric_rate<1>(const FlowMap<1>&,
                                          const std::vector<Vec<1>>&, double,
                                          const std::vector<Vec<1>>&);
template CheckReport check_metric_rate<2>(const FlowMap<2>&,
                                          const std::vector<Vec<2>>&, double,
                                          const std::vector<Vec<2>>&);
template CheckReport check_variational_jacobian<1>(const FlowMap<1>&,
                                                   const std::vector<Vec<1>>&,
                                                   double);
template CheckReport check_variational_jacobian<2>(const FlowMap<2>&,
                                                   const std::vector<Vec<2>>&,
                                                   double);
template CheckReport check_gradient_pullback<1>(const EvolvingMesh<1>&,
                                                const Vector&, double);
template CheckReport check_gradient_pullback<2>(const EvolvingMesh<2>&,
                                                const Vector&, double);
template CheckReport check_lambda_oracle<1>(const PivotSpec<1>&,
                                            const EvolvingMesh<1>&, double,
                                            const Vector&, const Vector&);
template CheckReport check_lambda_oracle<2>(const PivotSpec<2>&,
                                            const EvolvingMesh<2>&, double,
                                            const Vector&, const Vector&);
template CheckReport check_transport_theorem<1>(const PivotSpec<1>&,
                                                const EvolvingMesh<1>&,
                                                const CoefficientPath&,
                                                const CoefficientPath&,
                                                double);
template CheckReport check_transport_theorem<2>(const PivotSpec<2>&,
                                                const EvolvingMesh<2>&,
                                                const CoefficientPath&,
                                                const CoefficientPath&,
                                                double);

}  // namespace efem
