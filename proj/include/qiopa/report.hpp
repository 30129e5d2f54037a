#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qiopa {

/// Flat record of one evaluation; absent fields stay empty in CSV and are
/// omitted from JSON.
struct ReportRow {
  std::string command;
  std::string qubit;
  std::optional<double> g;
  std::string order;  // "first", "full", or empty
  std::optional<double> F;
  std::optional<double> F_star;
  std::optional<double> R;
  std::optional<double> R_star;
  std::optional<double> S1;
  std::optional<double> S2;
  std::optional<double> p_success;
  std::optional<std::uint64_t> C1;
  std::optional<std::uint64_t> C2;
  std::optional<double> sigma_R;
  std::optional<double> sigma_F;
  std::optional<double> z;
  std::optional<double> fit_A;
  std::optional<double> fit_c;
  std::optional<double> fit_w;
  std::optional<double> fit_B;
};

enum class ReportFormat { csv, json };

inline constexpr const char* kCsvHeader =
    "command,qubit,g,order,F,F_star,R,R_star,S1,S2,p_success,C1,C2,sigma_R,sigma_F,z,"
    "fit_A,fit_c,fit_w,fit_B";

/// Numbers carry 12 significant digits in both formats.
void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);
void write_json(std::ostream& out, const std::vector<ReportRow>& rows);

/// Writes to `path`, or to stdout when the path is empty or "-".
void emit_report(const std::vector<ReportRow>& rows, ReportFormat format,
                 const std::string& path);

/// 12-significant-digit serialization shared by both writers.
std::string format_number(double value);

}  // namespace qiopa
