#pragma once

// Built-in self test: tensor-core identities against a brute-force
// eigendecomposition, and a few analytic geometry oracles.

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "schur/tensor_core.hpp"

namespace schur {

struct SelftestCase {
  std::string group;  // "newton" or "oracle"
  std::string name;
  bool passed = false;
  double error = 0.0;
  double tolerance = 0.0;
};

struct SelftestOptions {
  std::string filter;  // substring of group or name; empty runs everything
  int samples = 200;   // random matrices per identity
  // P_r under test; defaults to newton_transform. Replaced in mutation tests.
  std::function<SymEndomorphism(const SymEndomorphism&, int)> newton;
};

std::vector<SelftestCase> run_selftest(const SelftestOptions& opts = {});

// Prints the table and the names of failing properties; returns the exit
// code (0 all passed, 1 otherwise).
int report_selftest(const std::vector<SelftestCase>& cases, std::ostream& out);

}  // namespace schur
