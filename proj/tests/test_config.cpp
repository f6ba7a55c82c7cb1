#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "schur/config.hpp"

using namespace schur;
using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({
    "schema_version": 1,
    "name": "t",
    "geometry": {"kind": "conformal", "n": 3, "eps": 0.1, "factors": ["sin1", "one", "cos2"]},
    "resolutions": [8, 16],
    "theorems": [{"id": "k-scalar", "k": 2},
                 {"id": "general-tensor", "tensor": "ricci", "conventions": ["tensor-thm", "hypersurface-thm"]}],
    "output": {"dir": "out", "format": "both"},
    "tolerances": {"disc": 0.02}
  })");
}

std::string error_field(const json& doc) {
  try {
    parse_config(doc);
  } catch (const SchemaError& e) {
    return e.field;
  }
  return "<accepted>";
}

}  // namespace

TEST(Config, ParsesAValidDocument) {
  const RunConfig cfg = parse_config(base());
  EXPECT_EQ(cfg.name, "t");
  const auto& g = std::get<ConformalGridSpec>(cfg.geometry);
  EXPECT_EQ(g.n, 3);
  ASSERT_EQ(g.factors.size(), 3u);
  EXPECT_EQ(g.factors[0].kind, TrigFactor::Kind::sin);
  EXPECT_EQ(g.factors[1].kind, TrigFactor::Kind::one);
  EXPECT_EQ(g.factors[2].kind, TrigFactor::Kind::cos);
  EXPECT_EQ(g.factors[2].k, 2);
  EXPECT_EQ(cfg.resolutions, (std::vector<int>{8, 16}));
  ASSERT_EQ(cfg.theorems.size(), 2u);
  EXPECT_EQ(cfg.theorems[0].kind, TheoremKind::k_scalar);
  EXPECT_EQ(cfg.theorems[0].k, 2);
  EXPECT_EQ(cfg.theorems[1].conventions.size(), 2u);
  EXPECT_FALSE(cfg.theorems[1].c.has_value());
  EXPECT_EQ(cfg.output.format, "both");
  EXPECT_EQ(cfg.output.stem, "t");
  EXPECT_FALSE(cfg.output.timings);
  EXPECT_DOUBLE_EQ(cfg.tolerances.disc_tolerance, 0.02);
  EXPECT_DOUBLE_EQ(cfg.tolerances.c_fit_tolerance, 0.05);
}

TEST(Config, UnknownKeysNameTheirPath) {
  json d = base();
  d["theorems"][1]["colour"] = 1;
  EXPECT_EQ(error_field(d), "theorems[1].colour");
  d = base();
  d["geometry"]["radius"] = 1;
  EXPECT_EQ(error_field(d), "geometry.radius");
  d = base();
  d["extra"] = true;
  EXPECT_EQ(error_field(d), "extra");
}

TEST(Config, RejectsBadValues) {
  json d = base();
  d["schema_version"] = 2;
  EXPECT_EQ(error_field(d), "schema_version");
  d = base();
  d["geometry"]["kind"] = "klein_bottle";
  EXPECT_EQ(error_field(d), "geometry.kind");
  d = base();
  d["geometry"]["factors"] = {"tan1"};
  EXPECT_EQ(error_field(d), "geometry.factors[0]");
  d = base();
  d["resolutions"] = {16, 4};
  EXPECT_EQ(error_field(d), "geometry");
  d = base();
  d["resolutions"] = json::array();
  EXPECT_EQ(error_field(d), "resolutions");
  d = base();
  d["resolutions"] = {16.5};
  EXPECT_EQ(error_field(d), "resolutions[0]");
  d = base();
  d["output"]["format"] = "xml";
  EXPECT_EQ(error_field(d), "output.format");
  d = base();
  d["tolerances"]["disc"] = -1;
  EXPECT_EQ(error_field(d), "tolerances.disc");
  d = base();
  d["theorems"][1]["conventions"] = {"sectional"};
  EXPECT_EQ(error_field(d), "theorems[1].conventions[0]");
  d = base();
  d["theorems"][0]["k"] = 1;
  EXPECT_EQ(error_field(d), "theorems[0].k");
  d = base();
  d.erase("theorems");
  EXPECT_EQ(error_field(d), "theorems");
}

TEST(Config, RejectsIncompatibleTheorems) {
  json d = base();
  d["theorems"] = {{{"id", "perez-r1"}}};
  EXPECT_EQ(error_field(d), "theorems[0].id");
  d["theorems"] = {{{"id", "hypersurface-r"}, {"r", 2}}};
  EXPECT_EQ(error_field(d), "theorems[0].id");
  d["theorems"] = {{{"id", "general-tensor"}, {"tensor", "shape"}}};
  EXPECT_EQ(error_field(d), "theorems[0].tensor");

  json m = base();
  m["geometry"] = {{"kind", "icosphere"}, {"radius", 1.0}};
  m["resolutions"] = {3};
  m["theorems"] = {{{"id", "k-scalar"}, {"k", 2}}};
  EXPECT_EQ(error_field(m), "theorems[0].id");
  m["theorems"] = {{{"id", "general-tensor"}, {"tensor", "T_k"}, {"k", 2}}};
  EXPECT_EQ(error_field(m), "theorems[0].tensor");
  m["theorems"] = {{{"id", "general-tensor"}, {"tensor", "custom"}, {"path", "x.txt"}}};
  EXPECT_EQ(error_field(m), "theorems[0].c");
  m["theorems"] = {{{"id", "perez-r1"}, {"variant", "ricci-nonnegative"}}};
  EXPECT_EQ(error_field(m), "<accepted>");
  m["resolutions"] = {12};
  EXPECT_EQ(error_field(m), "geometry");
}

TEST(Config, GeometryParametersAreProbed) {
  json d = base();
  d["geometry"] = {{"kind", "spun_torus4"}, {"major", 3.0}, {"minor", 0.5}, {"offset", 0.4}};
  d["theorems"] = {{{"id", "hypersurface-r"}, {"r", 2}}};
  EXPECT_EQ(error_field(d), "geometry");
  d["geometry"]["offset"] = 1.5;
  EXPECT_EQ(error_field(d), "<accepted>");
  json t = base();
  t["geometry"] = {{"kind", "torus"}, {"major", 0.5}, {"minor", 1.0}};
  t["resolutions"] = {4};
  t["theorems"] = {{{"id", "li-yau"}}};
  EXPECT_EQ(error_field(t), "geometry");
}

TEST(Config, MeshFilesResolveRelativePaths) {
  const auto dir = std::filesystem::temp_directory_path() / "schur_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "tet.off") << "OFF\n4 4 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n"
                                      "3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n";
  }
  json d = {{"schema_version", 1},
            {"geometry", {{"kind", "mesh_file"}, {"path", "tet.off"}}},
            {"theorems", {{{"id", "li-yau"}}}}};
  {
    std::ofstream(dir / "run.cfg") << d.dump();
  }
  const RunConfig cfg = load_config((dir / "run.cfg").string());
  EXPECT_EQ(std::filesystem::path(std::get<MeshFile>(cfg.geometry).path), dir / "tet.off");
  EXPECT_EQ(cfg.resolutions, std::vector<int>{0});
  EXPECT_EQ(cfg.output.stem, "run");
  d["resolutions"] = {1};
  EXPECT_EQ(error_field(d), "resolutions");
}

TEST(Config, MalformedJson) {
  const auto path = std::filesystem::temp_directory_path() / "schur_bad.cfg";
  {
    std::ofstream(path) << "{\"schema_version\": 1,";
  }
  EXPECT_THROW(load_config(path.string()), SchemaError);
  EXPECT_THROW(load_config("/nonexistent/x.cfg"), SchemaError);
}

TEST(Config, BundledConfigsParse) {
  for (const auto& entry : std::filesystem::directory_iterator(SCHUR_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    SCOPED_TRACE(entry.path().string());
    const RunConfig cfg = load_config(entry.path().string());
    EXPECT_GE(cfg.resolutions.size(), 2u);
    EXPECT_FALSE(cfg.theorems.empty());
  }
}
