#include "schur/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <sstream>

namespace schur {

namespace {

constexpr double kPi = std::numbers::pi;

double corner_angle(const Vec3& at, const Vec3& a, const Vec3& b) {
  const Vec3 u = a - at;
  const Vec3 v = b - at;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

double cot_at(const Vec3& at, const Vec3& a, const Vec3& b) {
  const Vec3 u = a - at;
  const Vec3 v = b - at;
  return u.dot(v) / u.cross(v).norm();
}

std::string face_label(int f, const Face& face) {
  std::ostringstream os;
  os << "face " << f << " (" << face[0] << "," << face[1] << "," << face[2] << ")";
  return os.str();
}

}  // namespace

std::string ValidationError::describe(const std::vector<std::string>& items) {
  if (items.empty()) return {};
  std::string s = ": ";
  const size_t shown = std::min<size_t>(items.size(), 8);
  for (size_t i = 0; i < shown; ++i) {
    if (i) s += "; ";
    s += items[i];
  }
  if (items.size() > shown) s += "; ... (" + std::to_string(items.size()) + " total)";
  return s;
}

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int nv = num_vertices();
  if (nv < 4 || faces_.size() < 4) throw ValidationError("mesh too small to be closed", {});

  std::vector<std::string> bad;
  for (int f = 0; f < num_faces(); ++f) {
    for (int k = 0; k < 3; ++k) {
      if (faces_[f][k] < 0 || faces_[f][k] >= nv) bad.push_back(face_label(f, faces_[f]));
    }
  }
  if (!bad.empty()) throw ValidationError("face references a missing vertex", bad);

  // Directed-edge census: each undirected edge must appear once per direction.
  std::map<std::pair<int, int>, int> directed;
  for (int f = 0; f < num_faces(); ++f) {
    const Face& t = faces_[f];
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) bad.push_back(face_label(f, t));
    for (int k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
  }
  if (!bad.empty()) throw ValidationError("face with repeated vertex", bad);

  std::vector<std::string> open_edges, misoriented;
  int edges = 0;
  for (const auto& [e, count] : directed) {
    const auto rev = directed.find({e.second, e.first});
    const std::string label = "edge (" + std::to_string(e.first) + "," + std::to_string(e.second) + ")";
    if (count > 1) misoriented.push_back(label);
    if (rev == directed.end()) {
      open_edges.push_back(label);
    } else if (e.first < e.second) {
      ++edges;
    }
  }
  if (!open_edges.empty()) throw ValidationError("mesh is not closed (boundary edges)", open_edges);
  if (!misoriented.empty()) {
    throw ValidationError("mesh is non-manifold or inconsistently oriented", misoriented);
  }
  num_edges_ = edges;

  for (int f = 0; f < num_faces(); ++f) {
    const Face& t = faces_[f];
    for (int k = 0; k < 3; ++k) {
      const double ang = corner_angle(vertices_[t[k]], vertices_[t[(k + 1) % 3]], vertices_[t[(k + 2) % 3]]);
      if (!(ang > 1e-3)) {
        bad.push_back(face_label(f, t));
        break;
      }
    }
  }
  if (!bad.empty()) throw ValidationError("degenerate triangles (min angle <= 1e-3 rad)", bad);

  // Orientation: outward means positive enclosed signed volume.
  double volume = 0.0;
  for (const Face& t : faces_) {
    volume += vertices_[t[0]].dot(vertices_[t[1]].cross(vertices_[t[2]])) / 6.0;
  }
  if (volume < 0.0) {
    for (Face& t : faces_) std::swap(t[1], t[2]);
    warnings_.push_back("faces reoriented to make normals point outward");
  }

  neighbors_.assign(nv, {});
  normals_.assign(nv, Vec3::Zero());
  dual_areas_.assign(nv, 0.0);
  angle_sums_.assign(nv, 0.0);
  voronoi_areas_.assign(nv, 0.0);
  double edge_sum = 0.0;
  for (const Face& t : faces_) {
    const Vec3 cr = (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]);
    const double area = 0.5 * cr.norm();
    for (int k = 0; k < 3; ++k) {
      const int i = t[k], j = t[(k + 1) % 3], l = t[(k + 2) % 3];
      neighbors_[i].push_back(j);
      normals_[i] += cr;
      dual_areas_[i] += area / 3.0;
      angle_sums_[i] += corner_angle(vertices_[i], vertices_[j], vertices_[l]);
      edge_sum += (vertices_[j] - vertices_[i]).norm();
    }
    // Mixed Voronoi split.
    const Vec3& a = vertices_[t[0]];
    const Vec3& b = vertices_[t[1]];
    const Vec3& c = vertices_[t[2]];
    const double dots[3] = {(b - a).dot(c - a), (c - b).dot(a - b), (a - c).dot(b - c)};
    const int obtuse = dots[0] < 0 ? 0 : (dots[1] < 0 ? 1 : (dots[2] < 0 ? 2 : -1));
    for (int k = 0; k < 3; ++k) {
      const int i = t[k];
      if (obtuse >= 0) {
        voronoi_areas_[i] += (obtuse == k) ? area / 2.0 : area / 4.0;
        continue;
      }
      const Vec3& p = vertices_[i];
      const Vec3& q = vertices_[t[(k + 1) % 3]];
      const Vec3& r = vertices_[t[(k + 2) % 3]];
      voronoi_areas_[i] += ((q - p).squaredNorm() * cot_at(r, p, q) + (r - p).squaredNorm() * cot_at(q, p, r)) / 8.0;
    }
  }
  mean_edge_length_ = edge_sum / (3.0 * num_faces());
  for (int i = 0; i < nv; ++i) {
    auto& nb = neighbors_[i];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    if (nb.empty()) bad.push_back("vertex " + std::to_string(i));
    normals_[i].normalize();
  }
  if (!bad.empty()) throw ValidationError("isolated vertices", bad);

  // Connectedness.
  std::vector<char> seen(nv, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : neighbors_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != nv) throw ValidationError("mesh is not connected", {});

  const int chi = euler_characteristic();
  if (chi > 2 || chi % 2 != 0) {
    throw ValidationError("Euler characteristic " + std::to_string(chi) +
                              " is not that of a closed orientable surface",
                          {});
  }
  double defect = 0.0;
  for (double s : angle_sums_) defect += 2.0 * kPi - s;
  if (std::abs(defect - 2.0 * kPi * chi) > 1e-8 * std::max(1.0, static_cast<double>(nv))) {
    throw ValidationError("Gauss-Bonnet check failed", {});
  }
}

double TriMesh::total_area() const {
  double a = 0.0;
  for (double w : dual_areas_) a += w;
  return a;
}

double legendre(int l, double x) {
  if (l == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

namespace {

struct RawMesh {
  std::vector<Vec3> v;
  std::vector<Face> f;
};

RawMesh unit_icosphere(int subdivisions) {
  if (subdivisions < 0 || subdivisions > 9) throw DomainError("icosphere subdivisions out of range 0..9");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  RawMesh m;
  m.v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : m.v) p.normalize();
  m.f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
         {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
         {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      m.v.push_back((m.v[a] + m.v[b]).normalized());
      const int idx = static_cast<int>(m.v.size()) - 1;
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<Face> next;
    next.reserve(m.f.size() * 4);
    for (const Face& f : m.f) {
      const int a = midpoint(f[0], f[1]);
      const int b = midpoint(f[1], f[2]);
      const int c = midpoint(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    m.f = std::move(next);
  }
  return m;
}

struct GenerateVisitor {
  TriMesh operator()(const IcosphereSpec& s) const {
    if (!(s.radius > 0)) throw DomainError("icosphere radius must be positive");
    RawMesh m = unit_icosphere(s.subdivisions);
    for (Vec3& p : m.v) p *= s.radius;
    return TriMesh(std::move(m.v), std::move(m.f));
  }
  TriMesh operator()(const EllipsoidSpec& s) const {
    if (!(s.a > 0 && s.b > 0 && s.c > 0)) throw DomainError("ellipsoid semi-axes must be positive");
    RawMesh m = unit_icosphere(s.subdivisions);
    for (Vec3& p : m.v) p = Vec3(s.a * p.x(), s.b * p.y(), s.c * p.z());
    return TriMesh(std::move(m.v), std::move(m.f));
  }
  TriMesh operator()(const TorusSpec& s) const {
    if (!(s.major > s.minor && s.minor > 0)) throw DomainError("torus requires major > minor > 0");
    if (s.nu < 3 || s.nv < 3) throw DomainError("torus resolution must be at least 3x3");
    std::vector<Vec3> v;
    std::vector<Face> f;
    v.reserve(static_cast<size_t>(s.nu) * s.nv);
    for (int i = 0; i < s.nu; ++i) {
      const double u = 2.0 * kPi * i / s.nu;
      for (int j = 0; j < s.nv; ++j) {
        const double w = 2.0 * kPi * j / s.nv;
        const double rho = s.major + s.minor * std::cos(w);
        v.emplace_back(rho * std::cos(u), rho * std::sin(u), s.minor * std::sin(w));
      }
    }
    auto id = [&](int i, int j) { return ((i % s.nu) * s.nv) + (j % s.nv); };
    for (int i = 0; i < s.nu; ++i) {
      for (int j = 0; j < s.nv; ++j) {
        f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      }
    }
    return TriMesh(std::move(v), std::move(f));
  }
  TriMesh operator()(const PerturbedSphereSpec& s) const {
    if (!(s.radius > 0)) throw DomainError("perturbed sphere radius must be positive");
    if (s.harmonic < 0) throw DomainError("harmonic index must be non-negative");
    if (!(std::abs(s.eps) < 1.0)) throw DomainError("perturbation must satisfy |eps| < 1");
    RawMesh m = unit_icosphere(s.subdivisions);
    for (Vec3& p : m.v) p *= s.radius * (1.0 + s.eps * legendre(s.harmonic, p.z()));
    return TriMesh(std::move(m.v), std::move(m.f));
  }
};

}  // namespace

TriMesh generate_mesh(const MeshSpec& spec) { return std::visit(GenerateVisitor{}, spec); }

std::string describe(const MeshSpec& spec) {
  std::ostringstream os;
  os.precision(6);
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, IcosphereSpec>) {
          os << "icosphere(" << s.radius << "," << s.subdivisions << ")";
        } else if constexpr (std::is_same_v<S, EllipsoidSpec>) {
          os << "ellipsoid(" << s.a << "," << s.b << "," << s.c << "," << s.subdivisions << ")";
        } else if constexpr (std::is_same_v<S, TorusSpec>) {
          os << "torus(" << s.major << "," << s.minor << "," << s.nu << "," << s.nv << ")";
        } else {
          os << "perturbed_sphere(" << s.radius << "," << s.eps << "," << s.harmonic << ","
             << s.subdivisions << ")";
        }
      },
      spec);
  return os.str();
}

// ---------------------------------------------------------------------------
// Shape operator by an implicit quadric patch fit.
//
// In the local frame (e1, e2, nu) at p, neighbours d = q - p have
// coordinates (u, v, w). The model
//   w = -1/2 (a u^2 + 2 b uv + c v^2) - 1/2 e w^2 + cubic(u, v) + l1 u + l2 v
// contains every sphere tangent to the frame exactly (a = c = e = 1/rho),
// so round spheres give an umbilic A to round-off. The linear terms absorb
// normal error; the normal is tilted by the fitted gradient and the fit is
// repeated until the gradient vanishes. A = [[a, b], [b, c]].

namespace {

std::vector<int> k_ring(const TriMesh& mesh, int v, int k) {
  std::vector<int> ring{v};
  std::vector<int> frontier{v};
  for (int step = 0; step < k; ++step) {
    std::vector<int> next;
    for (int a : frontier) {
      for (int b : mesh.neighbors()[a]) {
        if (std::find(ring.begin(), ring.end(), b) == ring.end()) {
          ring.push_back(b);
          next.push_back(b);
        }
      }
    }
    frontier = std::move(next);
  }
  ring.erase(ring.begin());
  std::sort(ring.begin(), ring.end());
  return ring;
}

void tangent_frame(const Vec3& n, Vec3& e1, Vec3& e2) {
  const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  e1 = (seed - seed.dot(n) * n).normalized();
  e2 = n.cross(e1);
}

struct FitResult {
  bool ok = false;
  Matrix shape;
  Vec3 normal;
  Vec3 e1, e2;
};

FitResult fit_patch(const TriMesh& mesh, int v, const std::vector<int>& ring) {
  FitResult out;
  const Vec3& p = mesh.vertices()[v];
  const double h = mesh.mean_edge_length();
  Vec3 n = mesh.normals()[v];
  Vec3 e1, e2;
  const int m = static_cast<int>(ring.size());
  if (m < 10) return out;
  Eigen::Matrix<double, Eigen::Dynamic, 10> design(m, 10);
  Vector rhs(m);
  Eigen::Matrix<double, 10, 1> coef;
  for (int iter = 0; iter < 12; ++iter) {
    tangent_frame(n, e1, e2);
    for (int i = 0; i < m; ++i) {
      const Vec3 d = (mesh.vertices()[ring[i]] - p) / h;
      const double u = d.dot(e1), s = d.dot(e2), w = d.dot(n);
      design.row(i) << -0.5 * u * u, -u * s, -0.5 * s * s, -0.5 * w * w, u * u * u, u * u * s,
          u * s * s, s * s * s, u, s;
      rhs(i) = w;
    }
    // Drop columns that vanish identically (the w^2 term on flat patches).
    std::vector<int> cols;
    for (int c = 0; c < 10; ++c) {
      if (design.col(c).norm() > 1e-14 * std::sqrt(static_cast<double>(m))) cols.push_back(c);
    }
    for (int c : {0, 1, 2, 8, 9}) {
      if (std::find(cols.begin(), cols.end(), c) == cols.end()) return out;
    }
    Matrix a(m, static_cast<Eigen::Index>(cols.size()));
    Vector colscale(cols.size());
    for (size_t j = 0; j < cols.size(); ++j) {
      colscale(j) = design.col(cols[j]).norm();
      a.col(j) = design.col(cols[j]) / colscale(j);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < a.cols()) return out;
    const Vector x = qr.solve(rhs);
    coef.setZero();
    for (size_t j = 0; j < cols.size(); ++j) coef(cols[j]) = x(j) / colscale(j);
    const double l1 = coef(8), l2 = coef(9);
    if (std::hypot(l1, l2) < 1e-14) break;
    n = (n - l1 * e1 - l2 * e2).normalized();
  }
  out.ok = true;
  out.normal = n;
  out.e1 = e1;
  out.e2 = e2;
  out.shape.resize(2, 2);
  out.shape << coef(0), coef(1), coef(1), coef(2);
  out.shape /= h;
  return out;
}

}  // namespace

ShapeField shape_operator(const TriMesh& mesh) {
  const int nv = mesh.num_vertices();
  ShapeField out;
  out.normal.resize(nv);
  out.e1.resize(nv);
  out.e2.resize(nv);
  out.shape.resize(nv);
  out.ring_used.resize(nv);
  std::vector<std::string> failed;
  for (int v = 0; v < nv; ++v) {
    FitResult fit;
    int ring = 2;
    for (; ring <= 3; ++ring) {
      fit = fit_patch(mesh, v, k_ring(mesh, v, ring));
      if (fit.ok) break;
    }
    if (!fit.ok) {
      failed.push_back("vertex " + std::to_string(v));
      continue;
    }
    out.normal[v] = fit.normal;
    out.e1[v] = fit.e1;
    out.e2[v] = fit.e2;
    out.shape[v] = SymEndomorphism(symmetrized(fit.shape));
    out.ring_used[v] = ring;
  }
  if (!failed.empty()) throw ValidationError("shape operator fit is rank-deficient", failed);
  return out;
}

MeshField<double> gauss_curvature_angle_defect(const TriMesh& mesh) {
  MeshField<double> k(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    k[v] = (2.0 * kPi - mesh.angle_sums()[v]) / mesh.voronoi_areas()[v];
  }
  return k;
}

double total_angle_defect(const TriMesh& mesh) {
  double s = 0.0;
  for (double a : mesh.angle_sums()) s += 2.0 * kPi - a;
  return s;
}

DiscreteOperator cotan_operator(const TriMesh& mesh) {
  const int nv = mesh.num_vertices();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.faces().size() * 12);
  std::map<std::pair<int, int>, double> edge_weight;
  for (const Face& t : mesh.faces()) {
    for (int k = 0; k < 3; ++k) {
      const int i = t[(k + 1) % 3], j = t[(k + 2) % 3];
      const double w = 0.5 * cot_at(mesh.vertices()[t[k]], mesh.vertices()[i], mesh.vertices()[j]);
      trip.emplace_back(i, j, -w);
      trip.emplace_back(j, i, -w);
      trip.emplace_back(i, i, w);
      trip.emplace_back(j, j, w);
      edge_weight[std::minmax(i, j)] += w;
    }
  }
  DiscreteOperator op;
  op.stiffness.resize(nv, nv);
  op.stiffness.setFromTriplets(trip.begin(), trip.end());
  op.weights = Eigen::Map<const Vector>(mesh.dual_areas().data(), nv);
  int negative = 0;
  for (const auto& [e, w] : edge_weight) {
    if (w < 0.0) ++negative;
  }
  if (negative > 0) {
    op.warnings.push_back("obtuse-dominated mesh: " + std::to_string(negative) +
                          " edges with negative cotangent weight");
  }
  return op;
}

double integrate(const TriMesh& mesh, const MeshField<double>& field) {
  if (field.size() != mesh.dual_areas().size()) throw DimensionError("integrate: field size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < field.size(); ++i) s += field[i] * mesh.dual_areas()[i];
  return s;
}

double integrate_norm_sq(const TriMesh& mesh, const MeshField<SymTensorSample>& field) {
  if (field.size() != mesh.dual_areas().size()) throw DimensionError("integrate: field size mismatch");
  const MetricAtPoint g = MetricAtPoint::euclidean(2);
  double s = 0.0;
  for (size_t i = 0; i < field.size(); ++i) s += norm_sq(field[i], g) * mesh.dual_areas()[i];
  return s;
}

namespace {

// Adjacency with lengths: mesh edges plus the unfolded diagonal of each
// convex two-triangle quad.
std::vector<std::vector<std::pair<int, double>>> path_graph(const TriMesh& mesh) {
  const int nv = mesh.num_vertices();
  std::vector<std::vector<std::pair<int, double>>> adj(nv);
  for (int v = 0; v < nv; ++v) {
    for (int w : mesh.neighbors()[v]) adj[v].emplace_back(w, (mesh.vertices()[w] - mesh.vertices()[v]).norm());
  }
  std::map<std::pair<int, int>, int> opposite;  // directed edge -> opposite vertex
  for (const Face& t : mesh.faces()) {
    for (int k = 0; k < 3; ++k) opposite[{t[k], t[(k + 1) % 3]}] = t[(k + 2) % 3];
  }
  for (const auto& [e, k] : opposite) {
    if (e.first > e.second) continue;
    const int l = opposite.at({e.second, e.first});
    const Vec3& pi = mesh.vertices()[e.first];
    const Vec3& pj = mesh.vertices()[e.second];
    const double len = (pj - pi).norm();
    const Vec3 axis = (pj - pi) / len;
    auto unfold = [&](const Vec3& q) {
      const double x = (q - pi).dot(axis);
      const double y = ((q - pi) - x * axis).norm();
      return std::pair{x, y};
    };
    const auto [xk, yk] = unfold(mesh.vertices()[k]);
    const auto [xl, yl] = unfold(mesh.vertices()[l]);
    // Crossing point of the unfolded segment k-l with the shared edge.
    const double xc = xk + (xl - xk) * yk / (yk + yl);
    if (xc <= 0.0 || xc >= len) continue;
    const double d = std::hypot(xk - xl, yk + yl);
    adj[k].emplace_back(l, d);
    adj[l].emplace_back(k, d);
  }
  return adj;
}

}  // namespace

double mesh_diameter(const TriMesh& mesh, int sources) {
  const int nv = mesh.num_vertices();
  const auto adj = path_graph(mesh);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> nearest(nv, inf);
  double diameter = 0.0;
  int source = 0;
  for (int s = 0; s < std::min(sources, nv); ++s) {
    std::vector<double> dist(nv, inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[source] = 0.0;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
      const auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[v]) continue;
      for (const auto& [w, len] : adj[v]) {
        const double nd = d + len;
        if (nd < dist[w]) {
          dist[w] = nd;
          pq.emplace(nd, w);
        }
      }
    }
    int far = 0;
    double far_d = -1.0;
    for (int v = 0; v < nv; ++v) {
      if (dist[v] == inf) throw DomainError("mesh_diameter: mesh is disconnected");
      diameter = std::max(diameter, dist[v]);
      nearest[v] = std::min(nearest[v], dist[v]);
      if (nearest[v] > far_d) {
        far_d = nearest[v];
        far = v;
      }
    }
    source = far;
  }
  return diameter;
}

}  // namespace schur
