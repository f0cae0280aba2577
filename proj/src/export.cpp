#include "irsopt/export.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace irsopt::harness {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const std::vector<AggregateRow>& rows) {
  std::string out = "sweep_param,sweep_value,scheme,metric,mean,std,n_trials\n";
  for (const auto& r : rows) {
    out += r.sweep_param;
    out += ',';
    if (r.sweep_value) out += format_double(*r.sweep_value);
    out += ',';
    out += r.scheme;
    out += ',';
    out += r.metric;
    out += ',';
    out += format_double(r.mean);
    out += ',';
    out += format_double(r.std);
    out += ',';
    out += std::to_string(r.n_trials);
    out += '\n';
  }
  return out;
}

std::string to_json(const std::vector<AggregateRow>& rows) {
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json rec;
    rec["sweep_param"] = r.sweep_param;
    rec["sweep_value"] = r.sweep_value ? nlohmann::ordered_json(*r.sweep_value) : nlohmann::ordered_json();
    rec["scheme"] = r.scheme;
    rec["metric"] = r.metric;
    rec["mean"] = r.mean;
    rec["std"] = r.std;
    rec["n_trials"] = r.n_trials;
    records.push_back(std::move(rec));
  }
  nlohmann::ordered_json root;
  root["records"] = std::move(records);
  return root.dump(2) + "\n";
}

std::string render(const std::vector<AggregateRow>& rows, ExportFormat format) {
  return format == ExportFormat::Csv ? to_csv(rows) : to_json(rows);
}

void export_rows(const std::vector<AggregateRow>& rows, const std::string& path, ExportFormat format) {
  const std::string text = render(rows, format);
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file '" + path + "'");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing output file '" + path + "'");
}

}  // namespace irsopt::harness
