#include "schur/report_io.hpp"

#include <cmath>
#include <cstdio>

namespace schur {

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "theorem", "geometry", "resolution",   "n",     "c",     "convention",       "K",
      "lambda1", "lhs",      "rhs",          "ratio", "equality_flag", "hypothesis_flags", "wall_ms"};
  return cols;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::string joined_flags(const InequalityReport& r) {
  std::string s;
  for (const auto& f : r.flags) {
    if (!s.empty()) s += ";";
    s += f;
  }
  return s;
}

}  // namespace

std::string csv_row(const InequalityReport& r) {
  std::string row = quote(r.id());
  auto cell = [&](const std::string& s) { row += "," + s; };
  cell(quote(r.geometry));
  cell(std::to_string(r.resolution));
  cell(std::to_string(r.n));
  cell(format_number(r.c));
  cell(convention_name(r.convention));
  cell(format_number(r.K));
  cell(format_number(r.lambda1));
  cell(format_number(r.lhs));
  cell(format_number(r.rhs));
  cell(r.ratio ? format_number(*r.ratio) : "");
  cell(r.equality ? "1" : "0");
  cell(quote(joined_flags(r)));
  cell(r.wall_ms ? format_number(*r.wall_ms) : "");
  return row;
}

void write_csv(std::ostream& out, const std::vector<InequalityReport>& reports) {
  const auto& cols = csv_columns();
  for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : reports) out << csv_row(r) << "\n";
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

nlohmann::json to_json(const InequalityReport& r) {
  nlohmann::json j;
  j["theorem"] = r.id();
  j["form"] = form_name(r.form);
  j["geometry"] = r.geometry;
  j["resolution"] = r.resolution;
  j["n"] = r.n;
  j["c"] = number(r.c);
  j["c_prescribed"] = r.c_prescribed;
  j["convention"] = convention_name(r.convention);
  j["convention_statement"] = convention_statement(r.convention);
  j["K"] = number(r.K);
  j["lambda1"] = number(r.lambda1);
  j["mean_trace"] = number(r.mean_trace);
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["ratio"] = r.ratio ? number(*r.ratio) : nlohmann::json();
  j["equality_flag"] = r.equality;
  j["trivial"] = r.trivial;
  j["hypothesis_ok"] = r.hypothesis_ok;
  j["gates_ok"] = r.gates_ok;
  j["hypothesis_flags"] = r.flags;
  j["wall_ms"] = r.wall_ms ? nlohmann::json(*r.wall_ms) : nlohmann::json();
  nlohmann::json inputs;
  inputs["int_oscillation"] = number(r.int_oscillation);
  inputs["int_traceless"] = number(r.int_traceless);
  inputs["int_full"] = number(r.int_full);
  inputs["eps_eq"] = number(r.eps_eq);
  j["integrals"] = inputs;
  nlohmann::json diag = nlohmann::json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = number(v);
  j["diagnostics"] = diag;
  return j;
}

void write_json(std::ostream& out, const std::vector<InequalityReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  nlohmann::json doc;
  doc["reports"] = arr;
  out << doc.dump(2) << "\n";
}

}  // namespace schur
