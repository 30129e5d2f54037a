#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qiopa/cloning_metrics.hpp"
#include "qiopa/detection_sim.hpp"
#include "qiopa/report.hpp"
#include "qiopa/rng.hpp"

namespace qiopa {

struct RunConfig {
  std::string command;
  std::string qubit_spec = "H";
  PolarizationQubit qubit;
  double g = 0.1;
  std::vector<double> g_list;
  int per_mode_cutoff = 4;
  int total_cutoff = 6;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  int random_qubits = 100;
  std::string order = "first";  // universality: first | full
  std::string mode = "cloning";
  double qe = 0.55;
  double z = 0.0;
  double z0 = 0.0;
  double sigma_z = 1.0;
  double p_peak = 1.0;
  double z_start = -5.0;
  double z_stop = 5.0;
  int z_steps = 21;
  std::string output;  // empty or "-": stdout
  std::string format = "csv";
  std::vector<std::string> warnings;

  TruncationPolicy truncation() const { return {per_mode_cutoff, total_cutoff}; }
  ReportFormat report_format() const {
    return format == "json" ? ReportFormat::json : ReportFormat::csv;
  }
};

/// The paper's three injected states: H, diagonal, left circular.
std::vector<std::pair<std::string, PolarizationQubit>> paper_qubits();

/// Haar-uniform qubit (uniform over the Bloch sphere, global phase fixed).
PolarizationQubit haar_random_qubit(Pcg32& rng);

/// Parses "H" / "diag" / "circ-left" or "re(a),im(a),re(b),im(b)".
/// Renormalizes with a warning when the norm is off by at most 1e-3 and
/// errors beyond that.
PolarizationQubit parse_qubit(const std::string& spec, std::vector<std::string>* warnings);

/// Raised when the user asked for --help; carries the text to print.
struct HelpRequested : Error {
  explicit HelpRequested(std::string help_text)
      : Error("help requested"), text(std::move(help_text)) {}
  std::string text;
};

/// Parses flags (and an optional flat key=value config file; flags win).
/// Throws Error on malformed or inconsistent input, HelpRequested on --help.
RunConfig parse_config(const std::vector<std::string>& args);

std::vector<ReportRow> cmd_fidelity(const RunConfig& config);
std::vector<ReportRow> cmd_sweep_gain(RunConfig& config);
std::vector<ReportRow> cmd_universality(const RunConfig& config);
std::vector<ReportRow> cmd_simulate(RunConfig& config);
std::vector<ReportRow> cmd_zscan(const RunConfig& config);

/// Dispatches config.command; does not write files.
std::vector<ReportRow> run_command(RunConfig& config);

/// Full program behavior: parse, run, emit, map failures to exit codes.
int run_cli(int argc, const char* const* argv);

}  // namespace qiopa
