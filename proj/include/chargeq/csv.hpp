#ifndef CHARGEQ_CSV_HPP
#define CHARGEQ_CSV_HPP

#include <string>
#include <vector>

#include "chargeq/measures.hpp"

namespace chargeq {

// fixed column layout of a scenario run; 12 significant digits
inline constexpr const char* kCsvHeader =
    "tau,Tc,Qc,Cc,I_lo,I_loz,Q_def,C_def,S_ab,trace_err,min_eig,opt_evals";

std::string records_to_csv(const std::vector<CorrelationRecord>& records);
void write_records_csv(const std::vector<CorrelationRecord>& records, const std::string& path);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // rows[i][j] pairs with columns[j]

  int column_index(const std::string& name) const;  // -1 when absent
  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace chargeq

#endif
