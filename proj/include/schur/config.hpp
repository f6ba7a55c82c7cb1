#pragma once

// Run configuration: a JSON document with a versioned schema. Every object
// rejects keys it does not know; errors name the offending field path.
//
//   {
//     "schema_version": 1,
//     "name": "sphere-equality",
//     "geometry": {"kind": "icosphere", "radius": 1.0},
//     "resolutions": [4, 5],
//     "theorems": [{"id": "perez-r1"}, {"id": "general-tensor", "tensor": "shape", "c": 1}],
//     "output": {"dir": ".", "format": "csv", "stem": "sphere-equality", "timings": false},
//     "tolerances": {"disc": 0.05, "c_fit": 0.05, "equality_scale": 1e-8, "cg": 1e-10, "jacobi": false}
//   }

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "schur/grid.hpp"
#include "schur/mesh.hpp"
#include "schur/verify.hpp"

namespace schur {

inline constexpr int kSchemaVersion = 1;

class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), field(path) {}
  std::string field;
};

struct MeshFile {
  std::string path;
};

// Geometry family; the resolution is applied per job.
using GeometryBase = std::variant<IcosphereSpec, EllipsoidSpec, TorusSpec, PerturbedSphereSpec, MeshFile, FlatGridSpec,
                                  ConformalGridSpec, ProductGridSpec, Torus3Spec, SpunTorus4Spec>;

bool is_mesh(const GeometryBase& g);
bool is_embedded(const GeometryBase& g);
// Mesh generators: subdivisions (torus: nv = res, nu = 2 res). Grids:
// points per axis. Mesh files ignore the resolution.
MeshSpec mesh_at(const GeometryBase& g, int resolution);
GridSpec grid_at(const GeometryBase& g, int resolution);

enum class TheoremKind { general_tensor, hypersurface_r, k_scalar, perez_r1, li_yau };
enum class TensorChoice { metric, ricci, shape, newton_p, newton_t, custom };

struct TheoremRequest {
  TheoremKind kind = TheoremKind::general_tensor;
  TensorChoice tensor = TensorChoice::metric;
  int r = 0;
  int k = 0;
  std::optional<double> c;
  std::vector<Convention> conventions;
  Variant variant = Variant::general;
  std::string custom_path;  // one row per sample, n*n covariant components
  std::string field;        // path in the config, for messages
};

struct OutputRequest {
  std::string dir = ".";
  std::string format = "csv";  // csv | json | both
  std::string stem = "report";
  bool timings = false;
};

struct RunConfig {
  std::string name;
  GeometryBase geometry;
  std::vector<int> resolutions;
  std::vector<TheoremRequest> theorems;
  OutputRequest output;
  VerifyOptions tolerances;
};

// base_dir resolves relative file paths inside the config.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

// Human-readable schema with defaults.
std::string config_reference();

}  // namespace schur
