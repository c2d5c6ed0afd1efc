#include "efem/assembly.hpp"

#include <cmath>

#include "efem/errors.hpp"

namespace efem {

namespace {

// Unit-interval P1 products: int phi_a phi_b = [[1/3,1/6],[1/6,1/3]].
constexpr double kMassUnit[2][2] = {{1.0 / 3.0, 1.0 / 6.0},
                                    {1.0 / 6.0, 1.0 / 3.0}};

double hat(int a, double q) { return a == 0 ? 1.0 - q : q; }

}  // namespace

template <int d>
Matrix assemble_mass(const EvolvingMesh<d>& mesh, double t,
                     const ScalarField<d>* weight) {
  const auto& ref = mesh.reference();
  const PushedGeometry<d> g = mesh.geometry(t);
  std::vector<ElementQuadData<d>> qd;
  if (weight) qd = mesh.quad_data(t);
  Matrix M = Matrix::Zero(ref.n_nodes(), ref.n_nodes());
  for (int e = 0; e < ref.n_elements(); ++e) {
    const auto [i, j] = ref.elements[e];
    const int idx[2] = {i, j};
    const double L = g.elem_len[e];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double v = 0.0;
        if (weight) {
          for (int q = 0; q < GaussRule3::n; ++q) {
            const double qq = GaussRule3::points[q];
            v += GaussRule3::weights[q] * hat(a, qq) * hat(b, qq) *
                 (*weight)(t, qd[e][q].x);
          }
        } else {
          v = kMassUnit[a][b];
        }
        M(idx[a], idx[b]) += L * v;
      }
  }
  return M;
}

template <int d>
Matrix assemble_stiffness(const EvolvingMesh<d>& mesh, double t,
                          const TensorField<d>* tensor) {
  const auto& ref = mesh.reference();
  const PushedGeometry<d> g = mesh.geometry(t);
  std::vector<ElementQuadData<d>> qd;
  if (tensor) qd = mesh.quad_data(t);
  Matrix K = Matrix::Zero(ref.n_nodes(), ref.n_nodes());
  for (int e = 0; e < ref.n_elements(); ++e) {
    const auto [i, j] = ref.elements[e];
    const int idx[2] = {i, j};
    const double L = g.elem_len[e];
    const Vec<d> tau = g.elem_tangent[e];
    double coeff = 1.0;
    if (tensor) {
      coeff = 0.0;
      for (int q = 0; q < GaussRule3::n; ++q)
        coeff += GaussRule3::weights[q] *
                 tau.dot((*tensor)(t, qd[e][q].x) * tau);
    }
    const double k = coeff / L;
    const double sgn[2] = {-1.0, 1.0};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) K(idx[a], idx[b]) += sgn[a] * sgn[b] * k;
  }
  return K;
}

template <int d>
Vector assemble_load(const EvolvingMesh<d>& mesh, double t,
                     const ScalarField<d>& f) {
  const auto& ref = mesh.reference();
  const PushedGeometry<d> g = mesh.geometry(t);
  const auto qd = mesh.quad_data(t);
  Vector F = Vector::Zero(ref.n_nodes());
  for (int e = 0; e < ref.n_elements(); ++e) {
    const auto [i, j] = ref.elements[e];
    const int idx[2] = {i, j};
    const double L = g.elem_len[e];
    for (int a = 0; a < 2; ++a) {
      double v = 0.0;
      for (int q = 0; q < GaussRule3::n; ++q)
        v += GaussRule3::weights[q] * hat(a, GaussRule3::points[q]) *
             f(t, qd[e][q].x);
      F[idx[a]] += L * v;
    }
  }
  return F;
}

template <int d>
Matrix assemble_divergence_form(const EvolvingMesh<d>& mesh, double t) {
  const auto& ref = mesh.reference();
  const PushedGeometry<d> g = mesh.geometry(t);
  Matrix G = Matrix::Zero(ref.n_nodes(), ref.n_nodes());
  for (int e = 0; e < ref.n_elements(); ++e) {
    const auto [i, j] = ref.elements[e];
    const int idx[2] = {i, j};
    const double c = g.elem_len[e] * g.elem_div[e];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        G(idx[a], idx[b]) += c * kMassUnit[a][b];
  }
  return G;
}

template <int d>
AssembledForms assemble_forms(const EvolvingMesh<d>& mesh, double t,
                              const ScalarField<d>* forcing) {
  AssembledForms forms;
  forms.time = t;
  forms.M = assemble_mass(mesh, t);
  forms.K = assemble_stiffness(mesh, t);
  forms.G = assemble_divergence_form(mesh, t);
  if (forcing)
    forms.F = assemble_load(mesh, t, *forcing);
  else
    forms.F = Vector::Zero(mesh.reference().n_nodes());
  return forms;
}

Matrix restrict_matrix(const Matrix& A, const std::vector<int>& index) {
  const auto n = static_cast<Eigen::Index>(index.size());
  Matrix R(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) R(r, c) = A(index[r], index[c]);
  return R;
}

Vector restrict_vector(const Vector& v, const std::vector<int>& index) {
  const auto n = static_cast<Eigen::Index>(index.size());
  Vector r(n);
  for (Eigen::Index k = 0; k < n; ++k) r[k] = v[index[k]];
  return r;
}

Vector solve_spd(const Matrix& A, const Vector& b, bool banded) {
  const Eigen::Index n = A.rows();
  if (banded && n >= 2) {
    // Thomas algorithm; stable without pivoting for SPD tridiagonal A.
    Vector diag(n), lower(n - 1), upper(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) diag[i] = A(i, i);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      lower[i] = A(i + 1, i);
      upper[i] = A(i, i + 1);
    }
    Vector c(n - 1), dd(n);
    c[0] = upper[0] / diag[0];
    dd[0] = b[0] / diag[0];
    for (Eigen::Index i = 1; i < n; ++i) {
      const double m = diag[i] - lower[i - 1] * c[i - 1];
      if (m == 0.0) throw AssemblyError("singular tridiagonal solve");
      if (i < n - 1) c[i] = upper[i] / m;
      dd[i] = (b[i] - lower[i - 1] * dd[i - 1]) / m;
    }
    Vector x(n);
    x[n - 1] = dd[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = dd[i] - c[i] * x[i + 1];
    return x;
  }
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() == Eigen::Success) return llt.solve(b);
  Eigen::PartialPivLU<Matrix> lu(A);
  return lu.solve(b);
}

template <int d>
double w1r_norm(const EvolvingMesh<d>& mesh, double t, const Vector& full_u,
                double r, bool gradient_only) {
  const auto& ref = mesh.reference();
  const PushedGeometry<d> g = mesh.geometry(t);
  double acc = 0.0;
  for (int e = 0; e < ref.n_elements(); ++e) {
    const auto [i, j] = ref.elements[e];
    const double L = g.elem_len[e];
    const double slope = (full_u[j] - full_u[i]) / L;
    acc += L * std::pow(std::abs(slope), r);
    if (!gradient_only) {
      for (int q = 0; q < GaussRule3::n; ++q) {
        const double qq = GaussRule3::points[q];
        const double uq = (1.0 - qq) * full_u[i] + qq * full_u[j];
        acc += L * GaussRule3::weights[q] * std::pow(std::abs(uq), r);
      }
    }
  }
  return std::pow(acc, 1.0 / r);
}

template Matrix assemble_mass<1>(const EvolvingMesh<1>&, double,
                                 const ScalarField<1>*);
template Matrix assemble_mass<2>(const EvolvingMesh<2>&, double,
                                 const ScalarField<2>*);
template Matrix assemble_stiffness<1>(const EvolvingMesh<1>&, double,
                                      const TensorField<1>*);
template Matrix assemble_stiffness<2>(const EvolvingMesh<2>&, double,
                                      const TensorField<2>*);
template Vector assemble_load<1>(const EvolvingMesh<1>&, double,
                                 const ScalarField<1>&);
template Vector assemble_load<2>(const EvolvingMesh<2>&, double,
                                 const ScalarField<2>&);
template Matrix assemble_divergence_form<1>(const EvolvingMesh<1>&, double);
template Matrix assemble_divergence_form<2>(const EvolvingMesh<2>&, double);
template AssembledForms assemble_forms<1>(const EvolvingMesh<1>&, double,
                                          const ScalarField<1>*);
template AssembledForms assemble_forms<2>(const EvolvingMesh<2>&, double,
                                          const ScalarField<2>*);
template double w1r_norm<1>(const EvolvingMesh<1>&, double, const Vector&,
                            double, bool);
template double w1r_norm<2>(const EvolvingMesh<2>&, double, const Vector&,
                            double, bool);

}  // namespace efem
