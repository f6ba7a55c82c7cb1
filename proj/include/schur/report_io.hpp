#pragma once

// CSV and JSON serialization of inequality reports.

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "schur/verify.hpp"

namespace schur {

// Fixed column order.
const std::vector<std::string>& csv_columns();

// Numbers are written with 17 significant digits so that identical
// reports give identical bytes. wall_ms is left empty when absent.
void write_csv(std::ostream& out, const std::vector<InequalityReport>& reports);
std::string csv_row(const InequalityReport& r);

nlohmann::json to_json(const InequalityReport& r);
void write_json(std::ostream& out, const std::vector<InequalityReport>& reports);

std::string format_number(double v);

}  // namespace schur
