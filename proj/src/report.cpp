#include "qiopa/report.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "qiopa/fock_core.hpp"

namespace qiopa {

namespace {

std::string csv_cell(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::string csv_cell(const std::optional<std::uint64_t>& v) {
  return v ? std::to_string(*v) : "";
}

void require_finite(const char* name, const std::optional<double>& v) {
  if (v && !std::isfinite(*v)) {
    throw Error(std::string("report field ") + name + " is not finite");
  }
}

void check_row(const ReportRow& r) {
  require_finite("g", r.g);
  require_finite("F", r.F);
  require_finite("F_star", r.F_star);
  require_finite("R", r.R);
  require_finite("R_star", r.R_star);
  require_finite("S1", r.S1);
  require_finite("S2", r.S2);
  require_finite("p_success", r.p_success);
  require_finite("sigma_R", r.sigma_R);
  require_finite("sigma_F", r.sigma_F);
  require_finite("z", r.z);
  require_finite("fit_A", r.fit_A);
  require_finite("fit_c", r.fit_c);
  require_finite("fit_w", r.fit_w);
  require_finite("fit_B", r.fit_B);
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kCsvHeader << "\n";
  for (const ReportRow& r : rows) {
    check_row(r);
    out << r.command << ',' << r.qubit << ',' << csv_cell(r.g) << ',' << r.order << ','
        << csv_cell(r.F) << ',' << csv_cell(r.F_star) << ',' << csv_cell(r.R) << ','
        << csv_cell(r.R_star) << ',' << csv_cell(r.S1) << ',' << csv_cell(r.S2) << ','
        << csv_cell(r.p_success) << ',' << csv_cell(r.C1) << ',' << csv_cell(r.C2) << ','
        << csv_cell(r.sigma_R) << ',' << csv_cell(r.sigma_F) << ',' << csv_cell(r.z) << ','
        << csv_cell(r.fit_A) << ',' << csv_cell(r.fit_c) << ',' << csv_cell(r.fit_w) << ','
        << csv_cell(r.fit_B) << "\n";
  }
}

void write_json(std::ostream& out, const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  auto put = [](nlohmann::ordered_json& obj, const char* key, const auto& v) {
    if (v) obj[key] = nlohmann::ordered_json::parse(format_number(static_cast<double>(*v)));
  };
  for (const ReportRow& r : rows) {
    check_row(r);
    nlohmann::ordered_json obj;
    obj["command"] = r.command;
    obj["qubit"] = r.qubit;
    put(obj, "g", r.g);
    if (!r.order.empty()) obj["order"] = r.order;
    put(obj, "F", r.F);
    put(obj, "F_star", r.F_star);
    put(obj, "R", r.R);
    put(obj, "R_star", r.R_star);
    put(obj, "S1", r.S1);
    put(obj, "S2", r.S2);
    put(obj, "p_success", r.p_success);
    if (r.C1) obj["C1"] = *r.C1;
    if (r.C2) obj["C2"] = *r.C2;
    put(obj, "sigma_R", r.sigma_R);
    put(obj, "sigma_F", r.sigma_F);
    put(obj, "z", r.z);
    put(obj, "fit_A", r.fit_A);
    put(obj, "fit_c", r.fit_c);
    put(obj, "fit_w", r.fit_w);
    put(obj, "fit_B", r.fit_B);
    doc.push_back(std::move(obj));
  }
  out << doc.dump(2) << "\n";
}

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format,
                 const std::string& path) {
  const bool to_stdout = path.empty() || path == "-";
  std::ofstream file;
  if (!to_stdout) {
    file.open(path, std::ios::out | std::ios::trunc);
    if (!file) throw Error("cannot open output file: " + path);
  }
  std::ostream& out = to_stdout ? std::cout : file;
  if (format == ReportFormat::csv) {
    write_csv(out, rows);
  } else {
    write_json(out, rows);
  }
  out.flush();
  if (!to_stdout && !file) throw Error("failed writing output file: " + path);
}

}  // namespace qiopa
