// Time-stamped P1 forms on the pushed mesh. Element lengths come from
// pushed nodes; scalar/tensor weights are evaluated at flow-pushed
// quadrature points. All reductions accumulate in element order, so results
// are identical for any worker count.
#pragma once

#include <functional>
#include <optional>

#include "efem/evolving_mesh.hpp"

namespace efem {

template <int d>
using ScalarField = std::function<double(double, const Vec<d>&)>;
template <int d>
using TensorField = std::function<Mat<d>(double, const Vec<d>&)>;

// M_ij = int_{M(t)} phi_i phi_j weight. Symmetric positive definite for
// positive weights.
template <int d>
Matrix assemble_mass(const EvolvingMesh<d>& mesh, double t,
                     const ScalarField<d>* weight = nullptr);

// K_ij = int_{M(t)} grad phi_i . (tensor) grad phi_j with piecewise-constant
// chord gradients. Identity tensor when none is given.
template <int d>
Matrix assemble_stiffness(const EvolvingMesh<d>& mesh, double t,
                          const TensorField<d>* tensor = nullptr);

// F_j = int_{M(t)} f phi_j.
template <int d>
Vector assemble_load(const EvolvingMesh<d>& mesh, double t,
                     const ScalarField<d>& f);

// Time-stamped bundle of the forms entering the coefficient ODE system:
// mass (symmetric positive definite), stiffness (symmetric positive
// semidefinite; constants in the kernel on closed curves), the divergence
// form and the load.
struct AssembledForms {
  double time = 0.0;
  Matrix M;
  Matrix K;
  Matrix G;
  Vector F;
};

template <int d>
AssembledForms assemble_forms(const EvolvingMesh<d>& mesh, double t,
                              const ScalarField<d>* forcing = nullptr);

// G_ij = int phi_i phi_j div_e with the chord-consistent divergence; this is
// the exact time derivative of assemble_mass (no weight) at fixed
// coefficients.
template <int d>
Matrix assemble_divergence_form(const EvolvingMesh<d>& mesh, double t);

// Restrict a full-node matrix/vector to the rows/columns of `index`.
Matrix restrict_matrix(const Matrix& A, const std::vector<int>& index);
Vector restrict_vector(const Vector& v, const std::vector<int>& index);

// Solve A x = b for symmetric positive definite A; uses the tridiagonal
// path when `banded` is set (interval topology), dense Cholesky otherwise.
Vector solve_spd(const Matrix& A, const Vector& b, bool banded);

// Norms of the pushforward of nodal coefficients at time t, by the same
// 3-point rule: L2 and H1 from the chord matrices, W^{1,r} by quadrature of
// |u|^r + |grad u|^r.
template <int d>
double w1r_norm(const EvolvingMesh<d>& mesh, double t, const Vector& full_u,
                double r, bool gradient_only = false);

}  // namespace efem
