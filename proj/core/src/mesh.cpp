#include "efem/mesh.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "efem/errors.hpp"

namespace efem {

template <int d>
std::vector<int> ReferenceMesh<d>::interior_nodes() const {
  std::vector<int> free;
  free.reserve(nodes.size());
  for (int i = 0; i < n_nodes(); ++i)
    if (!is_boundary_node(i)) free.push_back(i);
  return free;
}

ReferenceMesh<1> build_interval_mesh(double a, double b, int n) {
  if (!(a < b)) throw InvalidMeshError("interval mesh requires a < b");
  if (n < 2) throw InvalidMeshError("interval mesh requires n >= 2");
  ReferenceMesh<1> mesh;
  mesh.topology = Topology::IntervalWithBoundary;
  mesh.nodes.resize(n + 1);
  mesh.node_parameter.resize(n + 1);
  const double h = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    const double x = (i == n) ? b : a + i * h;
    mesh.nodes[i] = Vec<1>::Constant(x);
    mesh.node_parameter[i] = x;
  }
  mesh.elements.resize(n);
  for (int e = 0; e < n; ++e) mesh.elements[e] = {e, e + 1};
  mesh.boundary = {0, n};
  return mesh;
}

ReferenceMesh<2> build_circle_mesh(double R0, int n) {
  if (!(R0 > 0.0)) throw InvalidMeshError("circle mesh requires R0 > 0");
  if (n < 3) throw InvalidMeshError("circle mesh requires n >= 3");
  ReferenceMesh<2> mesh;
  mesh.topology = Topology::ClosedCurve;
  mesh.circle_radius = R0;
  mesh.nodes.resize(n);
  mesh.node_parameter.resize(n);
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * std::numbers::pi * k / n;
    mesh.nodes[k] = Vec<2>(R0 * std::cos(th), R0 * std::sin(th));
    mesh.node_parameter[k] = th;
  }
  mesh.elements.resize(n);
  for (int e = 0; e < n; ++e) mesh.elements[e] = {e, (e + 1) % n};
  return mesh;
}

template <int d>
std::string describe(const ReferenceMesh<d>& mesh) {
  std::ostringstream os;
  os << "# nodes " << mesh.n_nodes() << "\n";
  for (int i = 0; i < mesh.n_nodes(); ++i)
    os << i << " " << mesh.nodes[i].transpose() << "\n";
  os << "# elements " << mesh.n_elements() << "\n";
  for (int e = 0; e < mesh.n_elements(); ++e)
    os << e << " " << mesh.elements[e][0] << " " << mesh.elements[e][1]
       << "\n";
  os << "# boundary";
  for (int b : mesh.boundary) os << " " << b;
  os << "\n";
  return os.str();
}

template <int d>
Vector to_full(const ReferenceMesh<d>& mesh, const FeFunction& u) {
  if (u.space == SpaceTag::Full) {
    if (u.coefficients.size() != mesh.n_nodes())
      throw std::invalid_argument("coefficient length does not match mesh");
    return u.coefficients;
  }
  const auto free = mesh.interior_nodes();
  if (u.coefficients.size() != static_cast<Eigen::Index>(free.size()))
    throw std::invalid_argument("coefficient length does not match free set");
  Vector full = Vector::Zero(mesh.n_nodes());
  for (std::size_t k = 0; k < free.size(); ++k)
    full[free[k]] = u.coefficients[static_cast<Eigen::Index>(k)];
  return full;
}

template <int d>
FeFunction from_full(const ReferenceMesh<d>& mesh, const Vector& full,
                     SpaceTag tag) {
  FeFunction u;
  u.space = tag;
  if (tag == SpaceTag::Full) {
    u.coefficients = full;
    return u;
  }
  const auto free = mesh.interior_nodes();
  u.coefficients = Vector::Zero(static_cast<Eigen::Index>(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k)
    u.coefficients[static_cast<Eigen::Index>(k)] = full[free[k]];
  return u;
}

template std::string describe<1>(const ReferenceMesh<1>&);
template std::string describe<2>(const ReferenceMesh<2>&);
template Vector to_full<1>(const ReferenceMesh<1>&, const FeFunction&);
template Vector to_full<2>(const ReferenceMesh<2>&, const FeFunction&);
template FeFunction from_full<1>(const ReferenceMesh<1>&, const Vector&,
                                 SpaceTag);
template FeFunction from_full<2>(const ReferenceMesh<2>&, const Vector&,
                                 SpaceTag);
template struct ReferenceMesh<1>;
template struct ReferenceMesh<2>;

}  // namespace efem
