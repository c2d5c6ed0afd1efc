// Reference meshes: uniform partitions of an interval and inscribed regular
// polygons of a circle, plus piecewise-linear coefficient vectors over them.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "efem/types.hpp"

namespace efem {

enum class Topology { IntervalWithBoundary, ClosedCurve };
enum class SpaceTag { Full, ZeroBoundary };

template <int d>
struct ReferenceMesh {
  std::vector<Vec<d>> nodes;
  std::vector<std::array<int, 2>> elements;
  Topology topology = Topology::IntervalWithBoundary;
  std::vector<int> boundary;            // node indices; empty for curves
  std::vector<double> node_parameter;   // x for intervals, angle for curves
  double circle_radius = 0.0;           // curves only

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }

  double element_length(int e) const {
    return (nodes[elements[e][1]] - nodes[elements[e][0]]).norm();
  }
  Vec<d> element_tangent(int e) const {
    return (nodes[elements[e][1]] - nodes[elements[e][0]]).normalized();
  }
  double total_length() const {
    double s = 0.0;
    for (int e = 0; e < n_elements(); ++e) s += element_length(e);
    return s;
  }
  bool is_boundary_node(int i) const {
    for (int b : boundary)
      if (b == i) return true;
    return false;
  }
  // Free (non-boundary) node indices in ascending order.
  std::vector<int> interior_nodes() const;
};

// Uniform partition of (a,b) into n elements. Requires a < b and n >= 2.
ReferenceMesh<1> build_interval_mesh(double a, double b, int n);

// Regular n-gon inscribed in the circle of radius R0 (n >= 3, R0 > 0), with
// nodes at angles 2 pi k / n and cyclic connectivity.
ReferenceMesh<2> build_circle_mesh(double R0, int n);

// Plain-text node/element listing for debugging.
template <int d>
std::string describe(const ReferenceMesh<d>& mesh);

// Nodal coefficients over the reference mesh. ZeroBoundary functions carry
// entries for free nodes only.
struct FeFunction {
  Vector coefficients;
  SpaceTag space = SpaceTag::Full;
};

// Scatter free-node coefficients into a full-length nodal vector (zeros on
// the boundary) and gather back.
template <int d>
Vector to_full(const ReferenceMesh<d>& mesh, const FeFunction& u);
template <int d>
FeFunction from_full(const ReferenceMesh<d>& mesh, const Vector& full,
                     SpaceTag tag);

}  // namespace efem
