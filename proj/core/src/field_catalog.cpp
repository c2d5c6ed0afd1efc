#include "efem/field_catalog.hpp"

#include <cmath>
#include <cstdlib>

#include "efem/errors.hpp"

namespace efem {

namespace {

// w(t,x) = g(t) x + om J x + c, the shape shared by every catalog field.
// J is the 90-degree rotation (only active for d == 2).
template <int d>
VelocityField<d> affine_field(std::function<double(double)> g, double om,
                              const Vec<d>& c, const std::string& name,
                              double div_sup) {
  VelocityField<d> f;
  f.name = name;
  f.divergence_sup = div_sup;
  f.eval = [g, om, c](double t, const Vec<d>& x) {
    Vec<d> v = g(t) * x + c;
    if constexpr (d == 2) {
      v.x() += -om * x.y();
      v.y() += om * x.x();
    }
    (void)om;
    return v;
  };
  f.jacobian = [g, om](double t, const Vec<d>&) {
    Mat<d> J = g(t) * Mat<d>::Identity();
    if constexpr (d == 2) {
      J(0, 1) += -om;
      J(1, 0) += om;
    }
    (void)om;
    return J;
  };
  // Tangential divergence of g(t)x + om J x + c is g(t) for any tangent;
  // in 1-D it is the plain derivative g(t).
  f.divergence = [g](double t, const Vec<d>&) { return g(t); };
  return f;
}

}  // namespace

template <int d>
VelocityField<d> make_field(const std::string& name, const FieldParams& p,
                            double horizon) {
  const Vec<d> zero_vec = Vec<d>::Zero();

  if (name == "zero") {
    return affine_field<d>([](double) { return 0.0; }, 0.0, zero_vec, name,
                           0.0);
  }
  if (name == "translation") {
    Vec<d> c = zero_vec;
    c(0) = p.speed;
    return affine_field<d>([](double) { return 0.0; }, 0.0, c, name, 0.0);
  }
  if (name == "dilation") {
    const double a = p.rate;
    return affine_field<d>([a](double) { return a; }, 0.0, zero_vec, name,
                           std::abs(a));
  }
  if (name == "radial-circle") {
    const double a = p.amplitude;
    const double f = p.frequency;
    if (std::abs(a) >= 1.0)
      throw ConfigError("radial-circle amplitude must satisfy |a| < 1");
    // R(t) = R0 (1 + a sin(f t)), so g = R'/R.
    auto g = [a, f](double t) {
      return a * f * std::cos(f * t) / (1.0 + a * std::sin(f * t));
    };
    const double div_sup = std::abs(a) * f / (1.0 - std::abs(a));
    return affine_field<d>(g, 0.0, zero_vec, name, div_sup);
  }
  if (name == "rotating-circle") {
    if constexpr (d == 1)
      throw ConfigError("rotating-circle requires planar-curve geometry");
    const double a = p.rate;
    return affine_field<d>([a](double) { return a; }, p.omega, zero_vec, name,
                           std::abs(a));
  }
  if (name == "user-polynomial") {
    if constexpr (d != 1)
      throw ConfigError("user-polynomial is defined for 1-D intervals only");
    if (p.coefficients.empty())
      throw ConfigError("user-polynomial requires non-empty coeffs");
    const std::vector<double> c = p.coefficients;
    VelocityField<d> f;
    f.name = name;
    f.eval = [c](double, const Vec<d>& x) {
      double v = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x(0) + *it;
      return Vec<d>::Constant(v);
    };
    f.jacobian = [c](double, const Vec<d>& x) {
      double dv = 0.0;
      for (std::size_t k = c.size(); k-- > 1;)
        dv = dv * x(0) + static_cast<double>(k) * c[k];
      return Mat<d>::Constant(dv);
    };
    f.divergence = [jac = f.jacobian](double t, const Vec<d>& x) {
      return jac(t, x)(0, 0);
    };
    // Crude but safe derivative bound on |x| <= 4 for the stability reports.
    double bound = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k)
      bound += static_cast<double>(k) * std::abs(c[k]) * std::pow(4.0, k - 1);
    f.divergence_sup = bound;
    (void)horizon;
    return f;
  }
  throw ConfigError("unknown velocity field '" + name + "'");
}

bool field_exists(const std::string& name, int dim) {
  static const char* names_1d[] = {"zero", "translation", "dilation",
                                   "radial-circle", "user-polynomial"};
  static const char* names_2d[] = {"zero", "translation", "dilation",
                                   "radial-circle", "rotating-circle"};
  if (dim == 1) {
    for (auto* n : names_1d)
      if (name == n) return true;
  } else {
    for (auto* n : names_2d)
      if (name == n) return true;
  }
  return false;
}

template VelocityField<1> make_field<1>(const std::string&, const FieldParams&,
                                        double);
template VelocityField<2> make_field<2>(const std::string&, const FieldParams&,
                                        double);

}  // namespace efem
