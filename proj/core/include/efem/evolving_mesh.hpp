// A reference mesh transported by a flow map. Supplies two kinds of
// time-t geometry:
//
//  * chord data: pushed node positions/velocities and element chord
//    lengths/tangents, plus the chord-consistent divergence
//        div_e = (x_j - x_i) . (w_j - w_i) / |x_j - x_i|^2,
//    which is the exact logarithmic rate of the chord length;
//
//  * quadrature data: flow samples at the reference Gauss points of each
//    element (pushed position, tangential stretch J, tangential divergence
//    at the pushed point), used by the transported bilinear forms.
//
// Chord geometry for a declared time grid is cached at construction, so
// grid queries are read-only and the object can be shared across threads.
#pragma once

#include <vector>

#include "efem/flow_map.hpp"
#include "efem/mesh.hpp"

namespace efem {

template <int d>
struct PushedGeometry {
  double time = 0.0;
  std::vector<Vec<d>> position;
  std::vector<Vec<d>> velocity;     // w(t, x_i)
  std::vector<double> elem_len;
  std::vector<Vec<d>> elem_tangent;
  std::vector<double> elem_div;     // chord-consistent divergence
};

template <int d>
struct QuadSample {
  Vec<d> x = Vec<d>::Zero();  // flow-pushed quadrature point
  double stretch = 1.0;       // J at the reference quadrature point
  double divg = 0.0;          // tangential divergence at (t, x)
};

template <int d>
using ElementQuadData = std::array<QuadSample<d>, GaussRule3::n>;

template <int d>
class EvolvingMesh {
 public:
  EvolvingMesh(ReferenceMesh<d> reference, FlowMap<d> flow,
               std::vector<double> time_grid = {});

  const ReferenceMesh<d>& reference() const { return reference_; }
  const FlowMap<d>& flow() const { return flow_; }

  // Pushed chord geometry; cache hit for declared grid times, computed on
  // the fly otherwise. Throws AssemblyError on mesh tangling.
  PushedGeometry<d> geometry(double t) const;

  // Flow samples at the reference Gauss points of every element.
  std::vector<ElementQuadData<d>> quad_data(double t) const;

  // Reference quadrature point of element e at barycentric coordinate q.
  Vec<d> reference_quad_point(int e, double q) const;

  // Fixed-domain twin: geometry and quadrature data are pinned to t = 0 and
  // the flow is never integrated. The reduction sanity checks compare solves
  // over this twin against zero-velocity solves over the moving path.
  EvolvingMesh<d> frozen() const;

 private:
  PushedGeometry<d> compute_geometry(double t) const;

  ReferenceMesh<d> reference_;
  FlowMap<d> flow_;
  std::vector<double> grid_;
  std::vector<PushedGeometry<d>> cache_;
  bool frozen_ = false;
};

}  // namespace efem
