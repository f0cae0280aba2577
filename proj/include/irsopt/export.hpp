#pragma once

#include <string>
#include <vector>

#include "irsopt/harness.hpp"

namespace irsopt::harness {

enum class ExportFormat { Csv, Json };

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

/// Header: sweep_param,sweep_value,scheme,metric,mean,std,n_trials
std::string to_csv(const std::vector<AggregateRow>& rows);
/// {"records": [ {same fields}, ... ]}
std::string to_json(const std::vector<AggregateRow>& rows);

std::string render(const std::vector<AggregateRow>& rows, ExportFormat format);

/// Writes rendered rows to path ("-" for stdout). IoError names the path on failure.
void export_rows(const std::vector<AggregateRow>& rows, const std::string& path, ExportFormat format);

}  // namespace irsopt::harness
