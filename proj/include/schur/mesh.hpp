#pragma once

// Closed oriented triangle surfaces in R^3 (the n = 2 backend).

#include <array>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "schur/elliptic.hpp"
#include "schur/tensor_core.hpp"

namespace schur {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

template <class T>
using MeshField = std::vector<T>;

class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> offenders)
      : std::runtime_error(what + describe(offenders)), offending(std::move(offenders)) {}
  std::vector<std::string> offending;

 private:
  static std::string describe(const std::vector<std::string>& items);
};

// A validated closed surface. Construction checks every invariant:
// each undirected edge shared by exactly two faces, consistent orientation,
// minimum angle above 1e-3 rad, connectedness and Gauss-Bonnet.
// Faces are reoriented (with a warning) when the enclosed signed volume is
// negative, so vertex normals always point outward.
class TriMesh {
 public:
  TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_edges() const { return num_edges_; }
  int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }

  // One-ring neighbours of each vertex, sorted by index.
  const std::vector<std::vector<int>>& neighbors() const { return neighbors_; }
  // Area-weighted outward unit normals.
  const MeshField<Vec3>& normals() const { return normals_; }
  // Barycentric (lumped) dual areas.
  const MeshField<double>& dual_areas() const { return dual_areas_; }
  // Mixed Voronoi areas (circumcentric, with the obtuse-triangle split);
  // they also sum to the total area.
  const MeshField<double>& voronoi_areas() const { return voronoi_areas_; }
  double total_area() const;
  double mean_edge_length() const { return mean_edge_length_; }
  // Sum of angles incident to each vertex.
  const MeshField<double>& angle_sums() const { return angle_sums_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  int num_edges_ = 0;
  std::vector<std::vector<int>> neighbors_;
  MeshField<Vec3> normals_;
  MeshField<double> dual_areas_;
  MeshField<double> angle_sums_;
  MeshField<double> voronoi_areas_;
  double mean_edge_length_ = 0.0;
  std::vector<std::string> warnings_;
};

struct IcosphereSpec {
  double radius = 1.0;
  int subdivisions = 4;
};
struct EllipsoidSpec {
  double a = 1.0, b = 1.0, c = 1.0;
  int subdivisions = 4;
};
struct TorusSpec {
  double major = 2.0, minor = 0.5;
  int nu = 64, nv = 32;
};
// Radius rho * (1 + eps * P_l(z / |x|)) along each icosphere direction,
// with P_l the Legendre polynomial (zonal harmonic of degree l).
struct PerturbedSphereSpec {
  double radius = 1.0, eps = 0.1;
  int harmonic = 3;
  int subdivisions = 4;
};
using MeshSpec = std::variant<IcosphereSpec, EllipsoidSpec, TorusSpec, PerturbedSphereSpec>;

TriMesh generate_mesh(const MeshSpec& spec);
// ASCII OFF or OBJ, chosen by extension.
TriMesh load_mesh(const std::string& path);
TriMesh parse_off(const std::string& text);
TriMesh parse_obj(const std::string& text);
std::string describe(const MeshSpec& spec);

double legendre(int l, double x);

// Per-vertex shape operator in an orthonormal tangent frame (e1, e2) with
// normal nu; A X = D_X nu, positive on a sphere with outward normal.
struct ShapeField {
  MeshField<Vec3> normal;  // refined by the fit
  MeshField<Vec3> e1, e2;
  MeshField<SymEndomorphism> shape;
  MeshField<int> ring_used;  // 2 or 3
};

ShapeField shape_operator(const TriMesh& mesh);

// (2 pi - angle sum) / mixed Voronoi area. The barycentric area only
// converges at first order, the Voronoi area at second order.
MeshField<double> gauss_curvature_angle_defect(const TriMesh& mesh);
double total_angle_defect(const TriMesh& mesh);

// Cotangent stiffness and barycentric lumped mass.
DiscreteOperator cotan_operator(const TriMesh& mesh);

double integrate(const TriMesh& mesh, const MeshField<double>& field);
// Tangent tensors stored in the orthonormal frame, so g = identity.
double integrate_norm_sq(const TriMesh& mesh, const MeshField<SymTensorSample>& field);

// Max over 32 farthest-point-sampled sources of shortest-path distances
// on the edge graph augmented by the unfolded straight segment across each
// convex pair of adjacent triangles. Every graph edge is a path on the
// polyhedral surface, so the result bounds its geodesic diameter from above.
double mesh_diameter(const TriMesh& mesh, int sources = 32);

}  // namespace schur
