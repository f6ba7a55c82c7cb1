#include "schur/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace schur {

using nlohmann::json;

namespace {

class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }

  void expect_object() const {
    if (!j_.is_object()) throw SchemaError(path_, "expected an object");
  }

  void allow(const std::set<std::string>& keys) const {
    expect_object();
    for (const auto& [k, v] : j_.items()) {
      (void)v;
      if (!keys.count(k)) throw SchemaError(child_path(k), "unknown key");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  Node at(const std::string& key) const {
    if (!j_.contains(key)) throw SchemaError(child_path(key), "required field missing");
    return Node(j_.at(key), child_path(key));
  }

  double number(const std::string& key, std::optional<double> def = std::nullopt) const {
    if (!has(key)) {
      if (def) return *def;
      throw SchemaError(child_path(key), "required field missing");
    }
    const json& v = j_.at(key);
    if (!v.is_number()) throw SchemaError(child_path(key), "expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, std::optional<int> def = std::nullopt) const {
    if (!has(key)) {
      if (def) return *def;
      throw SchemaError(child_path(key), "required field missing");
    }
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw SchemaError(child_path(key), "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) const {
    if (!has(key)) {
      if (def) return *def;
      throw SchemaError(child_path(key), "required field missing");
    }
    const json& v = j_.at(key);
    if (!v.is_string()) throw SchemaError(child_path(key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw SchemaError(child_path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
};

TrigFactor parse_factor(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a factor string such as \"sin1\", \"cos2\" or \"one\"");
  const std::string s = v.get<std::string>();
  TrigFactor f;
  if (s == "one") return f;
  std::string head = s.substr(0, 3);
  if (head != "sin" && head != "cos") throw SchemaError(path, "unknown factor '" + s + "'");
  f.kind = head == "sin" ? TrigFactor::Kind::sin : TrigFactor::Kind::cos;
  try {
    size_t used = 0;
    f.k = std::stoi(s.substr(3), &used);
    if (used != s.size() - 3 || f.k < 1) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw SchemaError(path, "factor '" + s + "' needs a positive integer wavenumber");
  }
  return f;
}

GeometryBase parse_geometry(const Node& g, const std::string& base_dir) {
  const std::string kind = g.string("kind");
  if (kind == "icosphere") {
    g.allow({"kind", "radius"});
    return IcosphereSpec{g.number("radius", 1.0), 0};
  }
  if (kind == "ellipsoid") {
    g.allow({"kind", "a", "b", "c"});
    return EllipsoidSpec{g.number("a", 1.0), g.number("b", 1.0), g.number("c", 1.0), 0};
  }
  if (kind == "torus") {
    g.allow({"kind", "major", "minor"});
    return TorusSpec{g.number("major", 2.0), g.number("minor", 0.5), 0, 0};
  }
  if (kind == "perturbed_sphere") {
    g.allow({"kind", "radius", "eps", "harmonic"});
    return PerturbedSphereSpec{g.number("radius", 1.0), g.number("eps", 0.1), g.integer("harmonic", 3), 0};
  }
  if (kind == "mesh_file") {
    g.allow({"kind", "path"});
    std::filesystem::path p(g.string("path"));
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return MeshFile{p.string()};
  }
  if (kind == "flat") {
    g.allow({"kind", "n", "period"});
    return FlatGridSpec{g.integer("n", 3), g.number("period", 1.0)};
  }
  if (kind == "conformal") {
    g.allow({"kind", "n", "period", "eps", "factors"});
    ConformalGridSpec s{g.integer("n", 3), g.number("period", 1.0), g.number("eps", 0.1), {}};
    if (g.has("factors")) {
      const Node f = g.at("factors");
      if (!f.raw().is_array()) throw SchemaError(f.path(), "expected an array of factor strings");
      for (size_t i = 0; i < f.raw().size(); ++i) {
        s.factors.push_back(parse_factor(f.raw()[i], f.path() + "[" + std::to_string(i) + "]"));
      }
    } else {
      s.factors = {TrigFactor{TrigFactor::Kind::sin, 1}};
    }
    return s;
  }
  if (kind == "product") {
    g.allow({"kind", "n", "period", "eps"});
    return ProductGridSpec{g.integer("n", 3), g.number("period", 1.0), g.number("eps", 0.1)};
  }
  if (kind == "torus3") {
    g.allow({"kind", "major", "minor"});
    return Torus3Spec{g.number("major", 2.0), g.number("minor", 0.5)};
  }
  if (kind == "spun_torus4") {
    g.allow({"kind", "major", "minor", "offset"});
    return SpunTorus4Spec{g.number("major", 3.0), g.number("minor", 0.5), g.number("offset", 1.5)};
  }
  throw SchemaError(g.child_path("kind"), "unknown geometry kind '" + kind + "'");
}

TheoremRequest parse_theorem(const Node& t, const GeometryBase& geo, const std::string& base_dir) {
  TheoremRequest req;
  req.field = t.path();
  const std::string id = t.string("id");
  const bool mesh = is_mesh(geo);
  const bool embedded = is_embedded(geo);
  const bool grid = !mesh;
  auto conventions = [&](Convention def) {
    if (!t.has("conventions")) {
      req.conventions = {def};
      return;
    }
    const Node c = t.at("conventions");
    if (!c.raw().is_array() || c.raw().empty()) throw SchemaError(c.path(), "expected a non-empty array");
    for (size_t i = 0; i < c.raw().size(); ++i) {
      const json& v = c.raw()[i];
      const std::string p = c.path() + "[" + std::to_string(i) + "]";
      if (!v.is_string()) throw SchemaError(p, "expected \"tensor-thm\" or \"hypersurface-thm\"");
      try {
        req.conventions.push_back(parse_convention(v.get<std::string>()));
      } catch (const DomainError& e) {
        throw SchemaError(p, e.what());
      }
    }
  };
  auto variant = [&]() {
    const std::string v = t.string("variant", "general");
    if (v == "general") {
      req.variant = Variant::general;
    } else if (v == "ricci-nonnegative") {
      req.variant = Variant::ricci_nonnegative;
    } else {
      throw SchemaError(t.child_path("variant"), "expected \"general\" or \"ricci-nonnegative\"");
    }
  };

  if (id == "general-tensor") {
    t.allow({"id", "tensor", "r", "k", "c", "conventions", "variant", "path"});
    req.kind = TheoremKind::general_tensor;
    const std::string tensor = t.string("tensor");
    if (tensor == "metric") {
      req.tensor = TensorChoice::metric;
    } else if (tensor == "ricci") {
      req.tensor = TensorChoice::ricci;
    } else if (tensor == "shape") {
      req.tensor = TensorChoice::shape;
      if (grid && !embedded) throw SchemaError(t.child_path("tensor"), "shape operator needs a hypersurface geometry");
    } else if (tensor == "P_r") {
      req.tensor = TensorChoice::newton_p;
      if (grid && !embedded) throw SchemaError(t.child_path("tensor"), "P_r needs a hypersurface geometry");
      req.r = t.integer("r");
    } else if (tensor == "T_k") {
      req.tensor = TensorChoice::newton_t;
      if (mesh) throw SchemaError(t.child_path("tensor"), "T_k needs a grid geometry of dimension >= 3");
      req.k = t.integer("k");
    } else if (tensor == "custom") {
      req.tensor = TensorChoice::custom;
      std::filesystem::path p(t.string("path"));
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      req.custom_path = p.string();
      if (mesh && !t.has("c")) throw SchemaError(t.child_path("c"), "custom tensors on meshes need a prescribed c");
    } else {
      throw SchemaError(t.child_path("tensor"), "expected metric, ricci, shape, P_r, T_k or custom");
    }
    if (t.has("c")) req.c = t.number("c");
    conventions(Convention::tensor_thm);
    variant();
  } else if (id == "hypersurface-r") {
    t.allow({"id", "r", "variant"});
    req.kind = TheoremKind::hypersurface_r;
    if (!mesh && !embedded) throw SchemaError(t.child_path("id"), "hypersurface-r needs a hypersurface geometry");
    req.r = t.integer("r");
    if (req.r < 2) throw SchemaError(t.child_path("r"), "r must be at least 2");
    req.conventions = {Convention::hypersurface_thm};
    variant();
  } else if (id == "k-scalar") {
    t.allow({"id", "k", "variant"});
    req.kind = TheoremKind::k_scalar;
    if (mesh) throw SchemaError(t.child_path("id"), "k-scalar needs a grid geometry of dimension >= 3");
    req.k = t.integer("k");
    if (req.k < 2) throw SchemaError(t.child_path("k"), "k must be at least 2");
    req.conventions = {Convention::hypersurface_thm};
    variant();
  } else if (id == "perez-r1") {
    t.allow({"id", "variant"});
    req.kind = TheoremKind::perez_r1;
    if (!mesh) throw SchemaError(t.child_path("id"), "perez-r1 runs on surface meshes");
    req.conventions = {Convention::hypersurface_thm};
    variant();
  } else if (id == "li-yau") {
    t.allow({"id"});
    req.kind = TheoremKind::li_yau;
    req.conventions = {Convention::tensor_thm};
  } else {
    throw SchemaError(t.child_path("id"),
                      "unknown theorem '" + id + "' (general-tensor, hypersurface-r, k-scalar, perez-r1, li-yau)");
  }
  return req;
}

// Builds the smallest instance so parameter errors surface before any work.
void probe_geometry(const GeometryBase& g, const std::vector<int>& resolutions, const std::string& path) {
  try {
    if (std::holds_alternative<MeshFile>(g)) return;
    if (is_mesh(g)) {
      for (int res : resolutions) {
        if (res < 0 || res > 9) throw DomainError("mesh resolution must be in 0..9");
      }
      (void)generate_mesh(mesh_at(g, std::holds_alternative<TorusSpec>(g) ? 8 : 1));
    } else {
      for (int res : resolutions) {
        if (res < 8) throw DomainError("grid resolution below 8 per axis is refused (stencil support)");
      }
      (void)build_grid(grid_at(g, 8), 8);
    }
  } catch (const std::exception& e) {
    throw SchemaError(path, e.what());
  }
}

}  // namespace

bool is_mesh(const GeometryBase& g) { return g.index() <= 4; }

bool is_embedded(const GeometryBase& g) {
  return std::holds_alternative<Torus3Spec>(g) || std::holds_alternative<SpunTorus4Spec>(g);
}

MeshSpec mesh_at(const GeometryBase& g, int resolution) {
  if (auto* s = std::get_if<IcosphereSpec>(&g)) return IcosphereSpec{s->radius, resolution};
  if (auto* s = std::get_if<EllipsoidSpec>(&g)) return EllipsoidSpec{s->a, s->b, s->c, resolution};
  if (auto* s = std::get_if<TorusSpec>(&g)) return TorusSpec{s->major, s->minor, 2 * resolution, resolution};
  if (auto* s = std::get_if<PerturbedSphereSpec>(&g)) {
    return PerturbedSphereSpec{s->radius, s->eps, s->harmonic, resolution};
  }
  throw DomainError("not a mesh generator");
}

GridSpec grid_at(const GeometryBase& g, int) {
  if (auto* s = std::get_if<FlatGridSpec>(&g)) return *s;
  if (auto* s = std::get_if<ConformalGridSpec>(&g)) return *s;
  if (auto* s = std::get_if<ProductGridSpec>(&g)) return *s;
  if (auto* s = std::get_if<Torus3Spec>(&g)) return *s;
  if (auto* s = std::get_if<SpunTorus4Spec>(&g)) return *s;
  throw DomainError("not a grid geometry");
}

RunConfig parse_config(const json& doc, const std::string& base_dir) {
  const Node root(doc, "");
  root.allow({"schema_version", "name", "geometry", "resolutions", "theorems", "output", "tolerances"});
  const int version = root.integer("schema_version");
  if (version != kSchemaVersion) {
    throw SchemaError("schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                                            std::to_string(kSchemaVersion) + ")");
  }
  RunConfig cfg;
  cfg.name = root.string("name", "run");
  cfg.geometry = parse_geometry(root.at("geometry"), base_dir);

  if (std::holds_alternative<MeshFile>(cfg.geometry)) {
    if (root.has("resolutions")) throw SchemaError("resolutions", "mesh files have a fixed resolution");
    cfg.resolutions = {0};
  } else {
    const Node res = root.at("resolutions");
    if (!res.raw().is_array() || res.raw().empty()) throw SchemaError("resolutions", "expected a non-empty array");
    for (size_t i = 0; i < res.raw().size(); ++i) {
      const json& v = res.raw()[i];
      if (!v.is_number_integer()) throw SchemaError("resolutions[" + std::to_string(i) + "]", "expected an integer");
      cfg.resolutions.push_back(v.get<int>());
    }
  }
  probe_geometry(cfg.geometry, cfg.resolutions, "geometry");

  const Node th = root.at("theorems");
  if (!th.raw().is_array() || th.raw().empty()) throw SchemaError("theorems", "expected a non-empty array");
  for (size_t i = 0; i < th.raw().size(); ++i) {
    cfg.theorems.push_back(
        parse_theorem(Node(th.raw()[i], "theorems[" + std::to_string(i) + "]"), cfg.geometry, base_dir));
  }

  cfg.output.stem = cfg.name;
  if (root.has("output")) {
    const Node o = root.at("output");
    o.allow({"dir", "format", "stem", "timings"});
    cfg.output.dir = o.string("dir", ".");
    cfg.output.format = o.string("format", "csv");
    if (cfg.output.format != "csv" && cfg.output.format != "json" && cfg.output.format != "both") {
      throw SchemaError("output.format", "expected csv, json or both");
    }
    cfg.output.stem = o.string("stem", cfg.name);
    cfg.output.timings = o.boolean("timings", false);
  }
  if (root.has("tolerances")) {
    const Node t = root.at("tolerances");
    t.allow({"disc", "c_fit", "equality_scale", "cg", "jacobi"});
    VerifyOptions& v = cfg.tolerances;
    v.disc_tolerance = t.number("disc", v.disc_tolerance);
    v.c_fit_tolerance = t.number("c_fit", v.c_fit_tolerance);
    v.equality_scale = t.number("equality_scale", v.equality_scale);
    v.solver.cg_tolerance = t.number("cg", v.solver.cg_tolerance);
    v.solver.jacobi = t.boolean("jacobi", v.solver.jacobi);
    for (const char* key : {"disc", "c_fit", "equality_scale", "cg"}) {
      if (t.has(key) && !(t.number(key) > 0.0)) throw SchemaError(t.child_path(key), "must be positive");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path, "cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path, std::string("not valid JSON: ") + e.what());
  }
  return parse_config(doc, std::filesystem::path(path).parent_path().string());
}

std::string config_reference() {
  return R"(Config files are JSON objects (unknown keys are rejected):
  schema_version  1 (required)
  name            run name, default "run"
  geometry        {"kind": K, ...parameters}, K one of
                    icosphere(radius=1)  ellipsoid(a=1, b=1, c=1)  torus(major=2, minor=0.5)
                    perturbed_sphere(radius=1, eps=0.1, harmonic=3)  mesh_file(path)
                    flat(n=3, period=1)  conformal(n=3, period=1, eps=0.1, factors=["sin1"])
                    product(n=3, period=1, eps=0.1)  torus3(major=2, minor=0.5)
                    spun_torus4(major=3, minor=0.5, offset=1.5)
  resolutions     mesh subdivisions (torus: nv, with nu = 2 nv) or grid points per axis (>= 8);
                  omitted for mesh_file
  theorems        list of {"id": ...}:
                    general-tensor  tensor = metric | ricci | shape | P_r (r) | T_k (k) | custom (path),
                                    c (fitted on grids when omitted), conventions = ["tensor-thm"],
                                    variant = general | ricci-nonnegative
                    hypersurface-r  r >= 2, variant
                    k-scalar        k >= 2, variant
                    perez-r1        variant
                    li-yau
  output          dir=".", format = csv | json | both (default csv), stem = name, timings = false
  tolerances      disc=0.05, c_fit=0.05, equality_scale=1e-8, cg=1e-10, jacobi=false
Relative paths (mesh_file, custom tensors) are resolved against the config file's directory.
)";
}

}  // namespace schur
