#pragma once

// Executes a RunConfig: one job per resolution on a bounded worker pool.
// Each job builds its own geometry; reports come back in config order
// regardless of scheduling.

#include <string>
#include <vector>

#include "schur/config.hpp"
#include "schur/verify.hpp"

namespace schur {

enum ExitCode { kExitOk = 0, kExitRatio = 1, kExitSchema = 2, kExitHypothesis = 3, kExitSolver = 4 };

struct RunOptions {
  int jobs = 1;
  bool timings = false;
};

struct RunResult {
  std::vector<InequalityReport> reports;
  std::vector<std::string> errors;  // solver failures, one per failed job
  int exit_code = kExitOk;
};

RunResult run(const RunConfig& cfg, const RunOptions& opts = {});

// 4 solver failure > 3 hypothesis violation > 1 ratio or gate failure > 0.
int exit_code_for(const std::vector<InequalityReport>& reports, bool solver_failed, double disc_tolerance);

// Writes <dir>/<stem>.csv and/or .json; returns the paths written.
std::vector<std::string> write_reports(const std::vector<InequalityReport>& reports, const std::string& dir,
                                       const std::string& stem, const std::string& format);

// Reads a custom tensor: one line per sample with n*n components
// (whitespace or comma separated, '#' starts a comment).
TensorField load_tensor_file(const std::string& path, size_t samples, int n);

}  // namespace schur
