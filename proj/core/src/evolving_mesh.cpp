#include "efem/evolving_mesh.hpp"

#include <cmath>

#include "efem/errors.hpp"

namespace efem {

template <int d>
EvolvingMesh<d>::EvolvingMesh(ReferenceMesh<d> reference, FlowMap<d> flow,
                              std::vector<double> time_grid)
    : reference_(std::move(reference)),
      flow_(std::move(flow)),
      grid_(std::move(time_grid)) {
  cache_.reserve(grid_.size());
  for (double t : grid_) cache_.push_back(compute_geometry(t));
}

template <int d>
PushedGeometry<d> EvolvingMesh<d>::geometry(double t) const {
  if (frozen_) t = 0.0;
  for (std::size_t k = 0; k < grid_.size(); ++k)
    if (grid_[k] == t) return cache_[k];
  return compute_geometry(t);
}

template <int d>
EvolvingMesh<d> EvolvingMesh<d>::frozen() const {
  EvolvingMesh<d> twin(reference_, flow_, {});
  twin.frozen_ = true;
  return twin;
}

template <int d>
PushedGeometry<d> EvolvingMesh<d>::compute_geometry(double t) const {
  PushedGeometry<d> g;
  g.time = t;
  const int nn = reference_.n_nodes();
  const int ne = reference_.n_elements();
  g.position.resize(nn);
  g.velocity.resize(nn);
  for (int i = 0; i < nn; ++i) {
    g.position[i] = flow_.state(reference_.nodes[i], t).x;
    g.velocity[i] = flow_.field().eval(t, g.position[i]);
  }
  g.elem_len.resize(ne);
  g.elem_tangent.resize(ne);
  g.elem_div.resize(ne);
  for (int e = 0; e < ne; ++e) {
    const auto [i, j] = reference_.elements[e];
    const Vec<d> chord = g.position[j] - g.position[i];
    const double len = chord.norm();
    if (!(len > 0.0))
      throw AssemblyError("mesh tangled: zero-length element at t=" +
                          std::to_string(t));
    if constexpr (d == 1) {
      if (chord(0) <= 0.0)
        throw AssemblyError("mesh tangled: element inverted at t=" +
                            std::to_string(t));
    }
    g.elem_len[e] = len;
    g.elem_tangent[e] = chord / len;
    g.elem_div[e] = chord.dot(g.velocity[j] - g.velocity[i]) / (len * len);
  }
  return g;
}

template <int d>
Vec<d> EvolvingMesh<d>::reference_quad_point(int e, double q) const {
  const auto [i, j] = reference_.elements[e];
  return (1.0 - q) * reference_.nodes[i] + q * reference_.nodes[j];
}

template <int d>
std::vector<ElementQuadData<d>> EvolvingMesh<d>::quad_data(double t) const {
  if (frozen_) t = 0.0;
  const int ne = reference_.n_elements();
  std::vector<ElementQuadData<d>> data(ne);
  for (int e = 0; e < ne; ++e) {
    const Vec<d> tau0 = reference_.element_tangent(e);
    for (int q = 0; q < GaussRule3::n; ++q) {
      const Vec<d> pq = reference_quad_point(e, GaussRule3::points[q]);
      const FlowState<d> s = flow_.state(pq, t);
      QuadSample<d>& qs = data[e][q];
      qs.x = s.x;
      const Mat<d> Dw = flow_.field().jacobian(t, s.x);
      if constexpr (d == 1) {
        qs.stretch = std::abs(s.jac(0, 0));
        qs.divg = Dw(0, 0);
      } else {
        const Vec<d> dgphi = s.jac * tau0;
        qs.stretch = dgphi.norm();
        if (!(qs.stretch > 0.0))
          throw DegenerateFlowError("degenerate tangential stretch");
        const Vec<d> tau_t = dgphi / qs.stretch;
        qs.divg = tau_t.dot(Dw * tau_t);
      }
      if (!(qs.stretch > 0.0))
        throw DegenerateFlowError("degenerate flow at quadrature point");
    }
  }
  return data;
}

template class EvolvingMesh<1>;
template class EvolvingMesh<2>;

}  // namespace efem
