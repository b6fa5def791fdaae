#include "chargeq/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace chargeq {

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string records_to_csv(const std::vector<CorrelationRecord>& records) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    out += format_value(r.tau);
    for (double v : {r.T_c, r.Q_c, r.C_c, r.I_Lo, r.I_loz, r.Q_def, r.C_def, r.S_ab,
                     r.trace_error, r.min_eigenvalue}) {
      out += ',';
      out += format_value(v);
    }
    out += ',';
    out += std::to_string(r.optimizer_evals);
    out += '\n';
  }
  return out;
}

void write_records_csv(const std::vector<CorrelationRecord>& records, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << records_to_csv(records);
}

int CsvTable::column_index(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const int idx = column_index(name);
  if (idx < 0) throw std::invalid_argument("no such column: " + name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[static_cast<size_t>(idx)]);
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);

  CsvTable table;
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty CSV: " + path);
  std::stringstream header(line);
  for (std::string cell; std::getline(header, cell, ',');) table.columns.push_back(cell);

  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> row;
    for (std::string cell; std::getline(ss, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != table.columns.size())
      throw std::runtime_error("ragged CSV row in " + path);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace chargeq
