#include <algorithm>
#include <fstream>
#include <sstream>

#include "schur/mesh.hpp"

namespace schur {

namespace {

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

void fan(const std::vector<int>& poly, std::vector<Face>& faces) {
  for (size_t k = 1; k + 1 < poly.size(); ++k) faces.push_back({poly[0], poly[k], poly[k + 1]});
}

}  // namespace

TriMesh parse_off(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(strip_comment(line));
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) throw ValidationError("OFF: unexpected end of file", {});
    return tokens[pos++];
  };
  if (next() != "OFF") throw ValidationError("OFF: missing header", {});
  int nv = 0, nf = 0;
  try {
    nv = std::stoi(next());
    nf = std::stoi(next());
    (void)std::stoi(next());
    std::vector<Vec3> v(nv);
    for (int i = 0; i < nv; ++i) {
      for (int k = 0; k < 3; ++k) v[i][k] = std::stod(next());
    }
    std::vector<Face> faces;
    for (int f = 0; f < nf; ++f) {
      const int count = std::stoi(next());
      std::vector<int> poly(count);
      for (int k = 0; k < count; ++k) poly[k] = std::stoi(next());
      if (count < 3) throw ValidationError("OFF: face with fewer than 3 vertices", {"face " + std::to_string(f)});
      fan(poly, faces);
    }
    return TriMesh(std::move(v), std::move(faces));
  } catch (const std::invalid_argument&) {
    throw ValidationError("OFF: malformed number", {});
  }
}

TriMesh parse_obj(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Vec3> v;
  std::vector<Face> faces;
  int lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(strip_comment(line));
      std::string kind;
      if (!(ls >> kind)) continue;
      if (kind == "v") {
        Vec3 p;
        if (!(ls >> p.x() >> p.y() >> p.z())) {
          throw ValidationError("OBJ: malformed vertex", {"line " + std::to_string(lineno)});
        }
        v.push_back(p);
      } else if (kind == "f") {
        std::vector<int> poly;
        std::string tok;
        while (ls >> tok) {
          int idx = std::stoi(tok.substr(0, tok.find('/')));
          idx = idx < 0 ? static_cast<int>(v.size()) + idx : idx - 1;
          poly.push_back(idx);
        }
        if (poly.size() < 3) throw ValidationError("OBJ: face with fewer than 3 vertices", {"line " + std::to_string(lineno)});
        fan(poly, faces);
      }
    }
  } catch (const std::invalid_argument&) {
    throw ValidationError("OBJ: malformed index", {"line " + std::to_string(lineno)});
  }
  return TriMesh(std::move(v), std::move(faces));
}

TriMesh load_mesh(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ValidationError("cannot open mesh file " + path, {});
  std::stringstream buf;
  buf << file.rdbuf();
  std::string ext = path.substr(path.find_last_of('.') + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  if (ext == "off") return parse_off(buf.str());
  if (ext == "obj") return parse_obj(buf.str());
  throw ValidationError("unsupported mesh format ." + ext + " (expected .off or .obj)", {});
}

}  // namespace schur
