#include "efem/flow_map.hpp"

#include <cmath>
#include <sstream>

namespace efem {

namespace {

template <int d>
std::string point_str(double t, const Vec<d>& x) {
  std::ostringstream os;
  os << "t=" << t << ", x=(" << x.transpose() << ")";
  return os.str();
}

}  // namespace

template <int d>
FlowMap<d>::FlowMap(VelocityField<d> field, double horizon,
                    int substeps_per_unit)
    : field_(std::move(field)),
      horizon_(horizon),
      substeps_per_unit_(substeps_per_unit) {
  if (horizon_ <= 0.0) throw std::invalid_argument("flow horizon must be > 0");
  if (substeps_per_unit_ < 1)
    throw std::invalid_argument("substeps per unit time must be >= 1");
  steps_ = std::max(1, static_cast<int>(std::ceil(
                           substeps_per_unit_ * horizon_ - 1e-12)));
}

template <int d>
double FlowMap<d>::tolerance() const {
  const double dt = 1.0 / substeps_per_unit_;
  return 50.0 * dt * dt * dt * dt * std::max(1.0, horizon_);
}

template <int d>
double FlowMap<d>::jacobian_bound() const {
  return std::exp(field_.divergence_sup * horizon_);
}

namespace {

// One joint RK4 step of (x, DPhi) of size h starting at time t.
template <int d>
void rk4_step(const VelocityField<d>& field, double t, double h,
              FlowState<d>& s) {
  const Vec<d> k1 = field.eval(t, s.x);
  const Mat<d> K1 = field.jacobian(t, s.x) * s.jac;
  const Vec<d> x2 = s.x + 0.5 * h * k1;
  const Vec<d> k2 = field.eval(t + 0.5 * h, x2);
  const Mat<d> K2 = field.jacobian(t + 0.5 * h, x2) * (s.jac + 0.5 * h * K1);
  const Vec<d> x3 = s.x + 0.5 * h * k2;
  const Vec<d> k3 = field.eval(t + 0.5 * h, x3);
  const Mat<d> K3 = field.jacobian(t + 0.5 * h, x3) * (s.jac + 0.5 * h * K2);
  const Vec<d> x4 = s.x + h * k3;
  const Vec<d> k4 = field.eval(t + h, x4);
  const Mat<d> K4 = field.jacobian(t + h, x4) * (s.jac + h * K3);
  s.x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  s.jac += (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
  if (!s.x.allFinite() || !s.jac.allFinite())
    throw FlowIntegrationError(
        "non-finite field evaluation at " + point_str<d>(t + h, s.x), t + h);
}

}  // namespace

template <int d>
FlowState<d> FlowMap<d>::advance(FlowState<d> s, double t0, double t1) const {
  const double span = t1 - t0;
  if (span == 0.0) return s;
  const int n =
      std::max(1, static_cast<int>(std::ceil(
                      substeps_per_unit_ * std::abs(span) - 1e-12)));
  const double h = span / n;
  for (int k = 0; k < n; ++k) rk4_step(field_, t0 + k * h, h, s);
  return s;
}

template <int d>
FlowState<d> FlowMap<d>::state(const Vec<d>& p, double t) const {
  if (t < -1e-12 || t > horizon_ + 1e-9)
    throw std::invalid_argument("flow query outside [0, T]");
  FlowState<d> s;
  s.x = p;
  if (t == 0.0) return s;
  // Fixed step count regardless of t, so t -> state(p, t) is smooth.
  const double h = t / steps_;
  for (int k = 0; k < steps_; ++k) rk4_step(field_, k * h, h, s);
  return s;
}

template <int d>
GeometrySample<d> FlowMap<d>::sample(const Vec<d>& p, double t,
                                     const Vec<d>& tau0) const {
  const FlowState<d> s = state(p, t);
  GeometrySample<d> g;
  g.position = s.x;
  g.jac = s.jac;
  if constexpr (d == 1) {
    g.jdet = std::abs(s.jac(0, 0));
    g.metric = s.jac.transpose() * s.jac;
    g.metric_det = g.metric(0, 0);
  } else {
    const Vec<d> tau = tau0.normalized();
    const Vec<d> dgphi = s.jac * tau;  // tangential Jacobian times tau0
    const double stretch2 = dgphi.squaredNorm();
    Vec<d> nu;
    nu << -tau.y(), tau.x();
    g.metric = stretch2 * (tau * tau.transpose()) + nu * nu.transpose();
    g.metric_det = stretch2;
    g.jdet = std::sqrt(stretch2);
  }
  if (!(g.jdet > 0.0))
    throw DegenerateFlowError("non-positive Jacobian determinant at " +
                              point_str<d>(t, s.x));
  return g;
}

template <int d>
Vec<d> FlowMap<d>::inverse(const Vec<d>& x, double t) const {
  const double tol = tolerance();
  int mult = 1;
  for (int attempt = 0; attempt < 4; ++attempt, mult *= 2) {
    // Reverse-time trajectory: q(s) with dq/ds = -w(t - s, q), q(0) = x.
    Vec<d> q = x;
    const int n = std::max(1, static_cast<int>(std::ceil(
                                  mult * substeps_per_unit_ * t - 1e-12)));
    const double h = t / n;
    for (int k = 0; k < n; ++k) {
      const double s = k * h;
      auto rhs = [&](double sloc, const Vec<d>& y) {
        return (-field_.eval(t - sloc, y)).eval();
      };
      const Vec<d> k1 = rhs(s, q);
      const Vec<d> k2 = rhs(s + 0.5 * h, (q + 0.5 * h * k1).eval());
      const Vec<d> k3 = rhs(s + 0.5 * h, (q + 0.5 * h * k2).eval());
      const Vec<d> k4 = rhs(s + h, (q + h * k3).eval());
      q += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!q.allFinite())
        throw FlowIntegrationError(
            "non-finite reverse integration at " + point_str<d>(t - s, q),
            t - s);
    }
    const double residual = (state(q, t).x - x).norm();
    if (residual <= tol) return q;
  }
  const double residual = (state(x, t).x - x).norm();
  throw FlowInversionError("flow inversion failed to reach tolerance",
                           residual);
}

template <int d>
GeometrySample<d> evolve_point(const FlowMap<d>& flow, const Vec<d>& p,
                               double t, const Vec<d>& tau0) {
  return flow.sample(p, t, tau0);
}

template <int d>
Vec<d> inverse_flow(const FlowMap<d>& flow, const Vec<d>& x, double t) {
  return flow.inverse(x, t);
}

template <int d>
Mat<d> deformation_tensor(const VelocityField<d>& field, double t,
                          const Vec<d>& x) {
  const Mat<d> Dw = field.jacobian(t, x);
  const double div = field.divergence(t, x);
  return div * Mat<d>::Identity() - (Dw + Dw.transpose());
}

template <int d>
Mat<d> metric_time_derivative(const FlowMap<d>& flow, const Vec<d>& p,
                              double t, const Vec<d>& tau0) {
  const FlowState<d> s = flow.state(p, t);
  const Mat<d> Dw = flow.field().jacobian(t, s.x);
  if constexpr (d == 1) {
    const double dphi = s.jac(0, 0);
    if (std::abs(dphi) < 1e-300)
      throw DegenerateFlowError("singular DPhi in metric rate");
    const double jdet = std::abs(dphi);
    const double div = flow.field().divergence(t, s.x);
    const Mat<d> dphi_inv = s.jac.inverse();
    const Mat<d> binv = jdet * dphi_inv * dphi_inv.transpose();
    return div * binv -
           jdet * dphi_inv * (Dw + Dw.transpose()) * dphi_inv.transpose();
  } else {
    const Vec<d> tau = tau0.normalized();
    const Vec<d> dgphi = s.jac * tau;
    const double stretch = dgphi.norm();
    if (!(stretch > 0.0))
      throw DegenerateFlowError("singular tangential stretch in metric rate");
    const Vec<d> tau_t = dgphi / stretch;
    const double div_g = tau_t.dot(Dw * tau_t);
    return (-div_g / stretch) * (tau * tau.transpose());
  }
}

template class FlowMap<1>;
template class FlowMap<2>;
template GeometrySample<1> evolve_point<1>(const FlowMap<1>&, const Vec<1>&,
                                           double, const Vec<1>&);
template GeometrySample<2> evolve_point<2>(const FlowMap<2>&, const Vec<2>&,
                                           double, const Vec<2>&);
template Vec<1> inverse_flow<1>(const FlowMap<1>&, const Vec<1>&, double);
template Vec<2> inverse_flow<2>(const FlowMap<2>&, const Vec<2>&, double);
template Mat<1> deformation_tensor<1>(const VelocityField<1>&, double,
                                      const Vec<1>&);
template Mat<2> deformation_tensor<2>(const VelocityField<2>&, double,
                                      const Vec<2>&);
template Mat<1> metric_time_derivative<1>(const FlowMap<1>&, const Vec<1>&,
                                          double, const Vec<1>&);
template Mat<2> metric_time_derivative<2>(const FlowMap<2>&, const Vec<2>&,
                                          double, const Vec<2>&);

}  // namespace efem
