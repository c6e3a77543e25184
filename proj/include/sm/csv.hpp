// CSV output. Numbers use the shortest decimal form that parses back to the
// same double (std::to_chars), independent of locale; missing values are
// written as "nan". Every file is header-first and newline-terminated.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sm/harness.hpp"

namespace sm {

/// One parsed CSV table: header plus numeric rows.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of a named column; throws std::out_of_range if absent.
    std::size_t column(const std::string& name) const;
};

const std::vector<std::string>& sweep_columns();
const std::vector<std::string>& predict_columns();
const std::vector<std::string>& nom_columns();

/// Row values in sweep_columns() order.
std::vector<double> sweep_row(const SweepPoint& p);

void write_table(std::ostream& out, const CsvTable& table);
CsvTable read_table(std::istream& in);

CsvTable sweep_table(const SweepResult& result);
CsvTable predict_table(const std::vector<PredictPoint>& points, const SweepConfig& config);
CsvTable nom_table(const std::vector<NomPoint>& points);

/// Shortest round-trip decimal for v, or "nan".
std::string format_number(double v);

}  // namespace sm
