#include "schur/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "schur/report_io.hpp"

namespace schur {

TensorField load_tensor_file(const std::string& path, size_t samples, int n) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path, "cannot open tensor file");
  TensorField out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (!ls.eof()) throw SchemaError(path + ":" + std::to_string(lineno), "not a number");
    if (vals.empty()) continue;
    if (vals.size() != static_cast<size_t>(n * n)) {
      throw SchemaError(path + ":" + std::to_string(lineno), "expected " + std::to_string(n * n) + " components");
    }
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = vals[i * n + j];
    }
    const double asym = (m - m.transpose()).norm();
    if (asym > 1e-12 * std::max(1.0, m.norm())) {
      throw SchemaError(path + ":" + std::to_string(lineno), "tensor is not symmetric");
    }
    out.push_back(0.5 * (m + m.transpose()));
  }
  if (out.size() != samples) {
    throw SchemaError(path, "has " + std::to_string(out.size()) + " samples, geometry has " + std::to_string(samples));
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

// Builds a geometry for one resolution and evaluates every theorem on it.
class Job {
 public:
  Job(const RunConfig& cfg, int resolution) : cfg_(cfg), res_(resolution) {}

  std::vector<InequalityReport> run() {
    const auto t0 = Clock::now();
    if (is_mesh(cfg_.geometry)) {
      build_mesh();
    } else {
      GridManifold gm = build_grid(grid_at(cfg_.geometry, res_), res_);
      grid_ = make_grid_geometry(std::move(gm), cfg_.tolerances.solver);
      geo_ = &grid_->geo;
    }
    const double setup_ms = elapsed_ms(t0);

    std::vector<InequalityReport> out;
    for (const TheoremRequest& req : cfg_.theorems) {
      const auto t1 = Clock::now();
      std::vector<InequalityReport> reps;
      try {
        reps = evaluate(req);
      } catch (const HypothesisError& e) {
        reps = {refused(req, e.what())};
      } catch (const DomainError& e) {
        reps = {refused(req, e.what())};
      }
      const double ms = setup_ms + elapsed_ms(t1);
      for (auto& r : reps) {
        r.wall_ms = ms;
        out.push_back(std::move(r));
      }
    }
    return out;
  }

 private:
  static double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }

  void build_mesh() {
    std::string tag;
    TriMesh mesh = [&] {
      if (const auto* f = std::get_if<MeshFile>(&cfg_.geometry)) {
        tag = std::filesystem::path(f->path).filename().string();
        return load_mesh(f->path);
      }
      const MeshSpec spec = mesh_at(cfg_.geometry, res_);
      tag = describe(spec);
      return generate_mesh(spec);
    }();
    mesh_ = make_mesh_geometry(std::move(mesh), tag, res_, cfg_.tolerances.solver);
    geo_ = &mesh_->geo;
  }

  InequalityReport refused(const TheoremRequest& req, const std::string& why) const {
    InequalityReport r;
    r.theorem = theorem_label(req);
    r.equation = "refused";
    r.geometry = geo_->tag;
    r.resolution = res_;
    r.n = geo_->n;
    r.convention = req.conventions.empty() ? Convention::tensor_thm : req.conventions.front();
    r.lambda1 = geo_->eigen.lambda1;
    r.hypothesis_ok = false;
    r.flags.push_back("refused:" + why);
    return r;
  }

  static std::string theorem_label(const TheoremRequest& req) {
    switch (req.kind) {
      case TheoremKind::general_tensor: return "general-tensor";
      case TheoremKind::hypersurface_r: return "hypersurface-r";
      case TheoremKind::k_scalar: return "k-scalar";
      case TheoremKind::perez_r1: return "perez-r1";
      case TheoremKind::li_yau: return "li-yau";
    }
    return "?";
  }

  std::vector<InequalityReport> evaluate(const TheoremRequest& req) {
    const VerifyOptions& opts = cfg_.tolerances;
    switch (req.kind) {
      case TheoremKind::general_tensor: return general(req);
      case TheoremKind::hypersurface_r:
        return mesh_ ? verify_hypersurface_r(*mesh_, req.r, opts, req.variant)
                     : verify_hypersurface_r(*grid_, req.r, opts, req.variant);
      case TheoremKind::k_scalar: return verify_k_scalar(*grid_, req.k, opts, req.variant);
      case TheoremKind::perez_r1: return {verify_perez_r1(*mesh_, opts, req.variant)};
      case TheoremKind::li_yau:
        return {li_yau_report(*geo_, mesh_ ? mesh_diameter(mesh_->mesh) : grid_diameter(grid_->gm))};
    }
    return {};
  }

  std::vector<InequalityReport> general(const TheoremRequest& req) {
    TensorField t;
    // Analytic c for the mesh tensors; NaN means no default exists.
    double mesh_default = std::numeric_limits<double>::quiet_NaN();
    switch (req.tensor) {
      case TensorChoice::metric: t = metric_tensor(*geo_); break;
      case TensorChoice::ricci:
        if (mesh_) {
          t.resize(geo_->size());
          for (size_t v = 0; v < t.size(); ++v) t[v] = mesh_->gauss[v] * Matrix::Identity(2, 2);
          mesh_default = 0.5;
        } else {
          t = grid_->pack.ricci;
        }
        break;
      case TensorChoice::shape:
        if (mesh_) {
          t = mesh_shape_tensor(*mesh_);
          mesh_default = 1.0;
        } else {
          t = second_fundamental_form(grid_->gm);
        }
        break;
      case TensorChoice::newton_p:
        if (req.r < 0 || req.r > geo_->n) throw DomainError("r must satisfy 0 <= r <= n");
        if (mesh_) {
          t = mesh_newton_tensor(*mesh_, req.r);
          mesh_default = 0.0;
        } else {
          t = hypersurface_P_r(grid_->gm, req.r);
        }
        break;
      case TensorChoice::newton_t:
        if (!grid_->gm.conformally_flat()) {
          throw HypothesisError("geometry " + geo_->tag + " is not locally conformally flat; div T_k = 0 fails");
        }
        if (req.k < 0 || req.k > geo_->n) throw DomainError("k must satisfy 0 <= k <= n");
        t = schouten_sigma_k(grid_->gm, grid_->pack, req.k).newton;
        break;
      case TensorChoice::custom: t = load_tensor_file(req.custom_path, geo_->size(), geo_->n); break;
    }

    CFit fit;
    if (req.c) {
      fit = prescribed_c(*req.c);
    } else if (grid_) {
      fit = estimate_c(*grid_, t);
    } else if (!std::isnan(mesh_default)) {
      fit = prescribed_c(mesh_default);
    } else {
      // T = g: div T = 0 and grad B = 0, so any c works.
      fit.indeterminate = true;
      fit.residual = std::numeric_limits<double>::quiet_NaN();
    }

    std::vector<InequalityReport> out;
    for (Convention conv : req.conventions) {
      for (auto& r : verify_general_tensor(*geo_, t, fit, conv, cfg_.tolerances, req.variant)) {
        out.push_back(std::move(r));
      }
    }
    return out;
  }

  const RunConfig& cfg_;
  int res_;
  std::optional<MeshGeometry> mesh_;
  std::optional<GridGeometry> grid_;
  const Geometry* geo_ = nullptr;
};

}  // namespace

int exit_code_for(const std::vector<InequalityReport>& reports, bool solver_failed, double disc_tolerance) {
  if (solver_failed) return kExitSolver;
  bool hypothesis = false, failed = false;
  for (const auto& r : reports) {
    if (!r.hypothesis_ok) hypothesis = true;
    if (!r.passes(disc_tolerance)) failed = true;
  }
  if (hypothesis) return kExitHypothesis;
  return failed ? kExitRatio : kExitOk;
}

RunResult run(const RunConfig& cfg, const RunOptions& opts) {
  const size_t njobs = cfg.resolutions.size();
  std::vector<std::vector<InequalityReport>> slots(njobs);
  std::vector<std::string> errors(njobs);
  std::vector<std::exception_ptr> fatal(njobs);
  std::atomic<size_t> next{0};

  auto worker = [&] {
    for (size_t i = next++; i < njobs; i = next++) {
      try {
        slots[i] = Job(cfg, cfg.resolutions[i]).run();
      } catch (const SolverError& e) {
        errors[i] = "resolution " + std::to_string(cfg.resolutions[i]) + ": " + e.what();
      } catch (...) {
        fatal[i] = std::current_exception();
      }
    }
  };
  const size_t workers = std::clamp<size_t>(opts.jobs < 1 ? 1 : opts.jobs, 1, std::max<size_t>(njobs, 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& e : fatal) {
    if (e) std::rethrow_exception(e);
  }

  RunResult result;
  bool solver_failed = false;
  for (size_t i = 0; i < njobs; ++i) {
    for (auto& r : slots[i]) {
      if (!opts.timings) r.wall_ms.reset();
      result.reports.push_back(std::move(r));
    }
    if (!errors[i].empty()) {
      solver_failed = true;
      result.errors.push_back(errors[i]);
    }
  }
  result.exit_code = exit_code_for(result.reports, solver_failed, cfg.tolerances.disc_tolerance);
  return result;
}

std::vector<std::string> write_reports(const std::vector<InequalityReport>& reports, const std::string& dir,
                                       const std::string& stem, const std::string& format) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  auto open = [&](const std::string& ext) {
    const std::string path = (std::filesystem::path(dir) / (stem + ext)).string();
    written.push_back(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
  };
  if (format == "csv" || format == "both") {
    auto out = open(".csv");
    write_csv(out, reports);
  }
  if (format == "json" || format == "both") {
    auto out = open(".json");
    write_json(out, reports);
  }
  return written;
}

}  // namespace schur
