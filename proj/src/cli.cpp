#include "qiopa/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include <CLI11.hpp>

namespace qiopa {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

// Flat key=value config support: expand the file into long flags, letting
// explicit command-line flags win. Unknown keys surface as unknown options.
std::vector<std::string> expand_config_file(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size()) throw Error("--config needs a file path");
      path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else {
      out.push_back(a);
    }
  }
  if (path.empty()) return out;

  std::ifstream file(path);
  if (!file) throw Error("cannot read config file: " + path);

  std::set<std::string> explicit_flags;
  for (const std::string& a : out) {
    if (a.rfind("--", 0) == 0) explicit_flags.insert(a.substr(0, a.find('=')));
  }

  std::string line;
  int lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error("config file " + path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = "--" + trim(t.substr(0, eq));
    if (explicit_flags.count(key)) continue;
    out.push_back(key);
    out.push_back(trim(t.substr(eq + 1)));
  }
  return out;
}

std::uint64_t env_seed_default() {
  const char* env = std::getenv("QOPA_SEED");
  if (env == nullptr || *env == '\0') return 0;
  return std::strtoull(env, nullptr, 10);
}

std::string qubit_csv_label(const std::string& spec) {
  std::string label = spec;
  std::replace(label.begin(), label.end(), ',', ';');
  return label;
}

ReportRow base_row(const RunConfig& config) {
  ReportRow row;
  row.command = config.command;
  row.qubit = qubit_csv_label(config.qubit_spec);
  row.g = config.g;
  return row;
}

ReportRow report_to_row(const RunConfig& config, const std::string& qubit_label,
                        const FidelityReport& rep) {
  ReportRow row;
  row.command = config.command;
  row.qubit = qubit_csv_label(qubit_label);
  row.g = rep.g;
  row.order = rep.order == EvolutionOrder::first ? "first" : "full";
  row.F = rep.F;
  row.F_star = rep.F_star;
  row.R = rep.R;
  row.R_star = rep.R_star;
  row.S1 = rep.S1;
  row.S2 = rep.S2;
  row.p_success = rep.success_probability;
  return row;
}

ExperimentSetup setup_from(const RunConfig& config) {
  ExperimentSetup setup;
  setup.mode = config.mode == "unot" ? MeasurementMode::unot : MeasurementMode::cloning;
  setup.qubit = config.qubit;
  setup.g = GainParameter(config.g);
  setup.truncation = config.truncation();
  setup.qe = DetectorEfficiencies::uniform(config.qe);
  setup.injection = {config.z, config.z0, config.sigma_z, config.p_peak};
  setup.trials = config.trials;
  setup.master_seed = config.seed;
  return setup;
}

}  // namespace

std::vector<std::pair<std::string, PolarizationQubit>> paper_qubits() {
  return {
      {"H", PolarizationQubit(1.0, 0.0)},
      {"diag", PolarizationQubit(kInvSqrt2, kInvSqrt2)},
      {"circ-left", PolarizationQubit(kInvSqrt2, Complex(0.0, kInvSqrt2))},
  };
}

PolarizationQubit haar_random_qubit(Pcg32& rng) {
  double u = rng.uniform();
  double phase = 2.0 * std::numbers::pi * rng.uniform();
  double theta = std::acos(1.0 - 2.0 * u);
  return PolarizationQubit(std::cos(theta / 2.0),
                           std::sin(theta / 2.0) * Complex(std::cos(phase), std::sin(phase)));
}

PolarizationQubit parse_qubit(const std::string& spec, std::vector<std::string>* warnings) {
  for (const auto& [name, qubit] : paper_qubits()) {
    if (spec == name) return qubit;
  }
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      throw Error("qubit spec '" + spec + "': bad number '" + item + "'");
    }
    if (used != item.size()) throw Error("qubit spec '" + spec + "': bad number '" + item + "'");
    parts.push_back(value);
  }
  if (parts.size() != 4) {
    throw Error("qubit spec '" + spec + "' must be a name or re(a),im(a),re(b),im(b)");
  }
  Complex a{parts[0], parts[1]}, b{parts[2], parts[3]};
  double norm = std::sqrt(std::norm(a) + std::norm(b));
  if (norm <= 0.0) throw Error("qubit spec '" + spec + "' is the zero vector");
  if (std::abs(norm - 1.0) > 1e-3) {
    throw Error("qubit spec '" + spec + "' is far from unit norm (" + format_number(norm) + ")");
  }
  if (std::abs(norm - 1.0) > 1e-12 && warnings != nullptr) {
    warnings->push_back("qubit spec '" + spec + "' renormalized (norm " + format_number(norm) +
                        ")");
  }
  return PolarizationQubit(a / norm, b / norm);
}

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig config;
  config.seed = env_seed_default();

  CLI::App app{"quantum-injected amplifier simulator: optimal cloning and spin-flip metrics"};
  app.require_subcommand(1);

  std::string qubit_spec = "H";
  auto add_common = [&](CLI::App* cmd, bool with_qubit = true) {
    if (with_qubit) {
      cmd->add_option("--qubit", qubit_spec,
                      "named qubit (H, diag, circ-left) or re(a),im(a),re(b),im(b)");
    }
    cmd->add_option("--per-mode", config.per_mode_cutoff, "per-mode photon cutoff")
        ->check(CLI::Range(2, 16));
    cmd->add_option("--total", config.total_cutoff, "total photon cutoff")
        ->check(CLI::Range(3, 32));
    cmd->add_option("--seed", config.seed, "master RNG seed (env QOPA_SEED as fallback)");
    cmd->add_option("-o,--output", config.output, "output path ('-' for stdout)");
    cmd->add_option("--format", config.format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* fid = app.add_subcommand("fidelity", "analytic figures of merit for one qubit");
  fid->add_option("--g", config.g, "amplifier gain")->check(CLI::Range(0.0, 1.0));
  add_common(fid);

  CLI::App* sweep = app.add_subcommand("sweep-gain", "fidelity table over a gain list");
  sweep->add_option("--g", config.g_list, "gain values")
      ->required()
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  add_common(sweep);

  CLI::App* uni = app.add_subcommand("universality", "fidelity spread over random qubits");
  uni->add_option("--g", config.g, "amplifier gain")->check(CLI::Range(0.0, 1.0));
  uni->add_option("--count", config.random_qubits, "number of Haar-random qubits")
      ->check(CLI::Range(0, 1000000));
  uni->add_option("--order", config.order, "evolution order")
      ->check(CLI::IsMember({"first", "full"}));
  add_common(uni, false);

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo coincidence run");
  sim->add_option("--g", config.g, "amplifier gain")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--mode", config.mode, "measurement arm")
      ->check(CLI::IsMember({"cloning", "unot"}));
  sim->add_option("--trials", config.trials, "number of trials");
  sim->add_option("--qe", config.qe, "detector quantum efficiency")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--z", config.z, "pump mirror position");
  sim->add_option("--z0", config.z0, "resonance center");
  sim->add_option("--sigma-z", config.sigma_z, "resonance width");
  sim->add_option("--p-peak", config.p_peak, "peak overlap probability")
      ->check(CLI::Range(0.0, 1.0));
  add_common(sim);

  CLI::App* zscan = app.add_subcommand("zscan", "coincidences versus mirror position, with fit");
  zscan->add_option("--g", config.g, "amplifier gain")->check(CLI::Range(0.0, 1.0));
  zscan->add_option("--mode", config.mode, "measurement arm")
      ->check(CLI::IsMember({"cloning", "unot"}));
  zscan->add_option("--trials", config.trials, "trials per scan point");
  zscan->add_option("--qe", config.qe, "detector quantum efficiency")
      ->check(CLI::Range(0.0, 1.0));
  zscan->add_option("--z-start", config.z_start, "scan start");
  zscan->add_option("--z-stop", config.z_stop, "scan stop");
  zscan->add_option("--z-steps", config.z_steps, "scan points")->check(CLI::Range(2, 100000));
  zscan->add_option("--z0", config.z0, "resonance center");
  zscan->add_option("--sigma-z", config.sigma_z, "resonance width");
  zscan->add_option("--p-peak", config.p_peak, "peak overlap probability")
      ->check(CLI::Range(0.0, 1.0));
  add_common(zscan);

  std::vector<std::string> expanded = expand_config_file(args);
  std::vector<const char*> argv;
  argv.push_back("qiopa");
  for (const std::string& a : expanded) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw Error(std::string("invalid arguments: ") + e.what());
  }

  for (CLI::App* cmd : {fid, sweep, uni, sim, zscan}) {
    if (cmd->parsed()) config.command = cmd->get_name();
  }
  config.qubit_spec = qubit_spec;
  config.qubit = parse_qubit(qubit_spec, &config.warnings);

  if (config.command == "simulate" || config.command == "zscan") {
    if (config.trials < 1) throw Error("trials must be >= 1");
  }
  if (config.command == "zscan" && !(config.z_stop > config.z_start)) {
    throw Error("zscan needs z-stop > z-start");
  }
  if (GainParameter(config.g).beyond_linear_regime()) {
    config.warnings.push_back("gain " + format_number(config.g) +
                              " is beyond the linearized regime (g <= 0.3)");
  }
  return config;
}

std::vector<ReportRow> cmd_fidelity(const RunConfig& config) {
  if (config.g <= 0.0) throw Error("no amplification at g = 0; nothing to post-select");
  OpaModel model(config.truncation());
  GainParameter g(config.g);
  std::vector<ReportRow> rows;
  for (EvolutionOrder order : {EvolutionOrder::first, EvolutionOrder::full}) {
    rows.push_back(
        report_to_row(config, config.qubit_spec, evaluate_fidelity(model, config.qubit, g, order)));
  }
  return rows;
}

std::vector<ReportRow> cmd_sweep_gain(RunConfig& config) {
  if (config.g_list.empty()) throw Error("sweep-gain needs at least one gain value");
  std::sort(config.g_list.begin(), config.g_list.end());
  auto last = std::unique(config.g_list.begin(), config.g_list.end());
  if (last != config.g_list.end()) {
    config.warnings.push_back("duplicate gain values removed");
    config.g_list.erase(last, config.g_list.end());
  }
  for (double g : config.g_list) {
    if (g <= 0.0) throw Error("sweep-gain needs strictly positive gains");
  }

  OpaModel model(config.truncation());
  std::vector<ReportRow> rows;
  for (double g : config.g_list) {
    rows.push_back(report_to_row(
        config, config.qubit_spec,
        evaluate_fidelity(model, config.qubit, GainParameter(g), EvolutionOrder::full)));
  }
  return rows;
}

std::vector<ReportRow> cmd_universality(const RunConfig& config) {
  OpaModel model(config.truncation());
  GainParameter g(config.g);
  EvolutionOrder order = config.order == "full" ? EvolutionOrder::full : EvolutionOrder::first;

  std::vector<std::string> labels;
  std::vector<PolarizationQubit> qubits;
  for (const auto& [name, qubit] : paper_qubits()) {
    labels.push_back(name);
    qubits.push_back(qubit);
  }
  Pcg32 rng = substream(config.seed, 0x71b17, 0);
  for (int i = 0; i < config.random_qubits; ++i) {
    labels.push_back("rand-" + std::to_string(i));
    qubits.push_back(haar_random_qubit(rng));
  }

  UniversalityScan scan = universality_scan(model, qubits, g, order);
  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    rows.push_back(report_to_row(config, labels[i], scan.reports[i]));
  }
  ReportRow summary = base_row(config);
  summary.qubit = "max-deviation";
  summary.order = config.order;
  summary.F = scan.max_dev_F;
  summary.F_star = scan.max_dev_F_star;
  rows.push_back(summary);
  return rows;
}

std::vector<ReportRow> cmd_simulate(RunConfig& config) {
  ExperimentSetup setup = setup_from(config);
  CoincidenceCounts counts = run_trials(setup);

  ReportRow row = base_row(config);
  row.z = config.z;
  row.C1 = counts.c1;
  row.C2 = counts.c2;
  if (counts.c2 > 0) {
    RatioEstimate r = estimate_R(counts);
    RatioEstimate f = fidelity_from_counts(counts);
    if (counts.mode == MeasurementMode::cloning) {
      row.R = r.value;
    } else {
      row.R_star = r.value;
      row.F_star = f.value;
    }
    if (counts.mode == MeasurementMode::cloning) row.F = f.value;
    row.sigma_R = r.sigma;
    row.sigma_F = f.sigma;
    if (counts.c1 == 0 || counts.c1 + counts.c2 < 25) {
      config.warnings.push_back("coincidence counts too small for a stable estimate");
    }
  } else {
    config.warnings.push_back("C2 = 0: ratio and fidelity estimates undefined");
  }
  return {row};
}

std::vector<ReportRow> cmd_zscan(const RunConfig& config) {
  ExperimentSetup setup = setup_from(config);
  std::vector<double> zs(static_cast<std::size_t>(config.z_steps));
  double step = (config.z_stop - config.z_start) / (config.z_steps - 1);
  for (int i = 0; i < config.z_steps; ++i) zs[static_cast<std::size_t>(i)] = config.z_start + i * step;

  std::vector<ScanPoint> points = z_scan(setup, zs);
  std::vector<ReportRow> rows;
  std::vector<double> c1(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    ReportRow row = base_row(config);
    row.z = points[i].z;
    row.C1 = points[i].counts.c1;
    row.C2 = points[i].counts.c2;
    rows.push_back(row);
    c1[i] = static_cast<double>(points[i].counts.c1);
  }

  GaussianFit fit = fit_gaussian(zs, c1);
  ReportRow fit_row = base_row(config);
  fit_row.order = "fit";
  fit_row.fit_A = fit.amplitude;
  fit_row.fit_c = fit.center;
  fit_row.fit_w = fit.width;
  fit_row.fit_B = fit.offset;
  rows.push_back(fit_row);
  return rows;
}

std::vector<ReportRow> run_command(RunConfig& config) {
  if (config.command == "fidelity") return cmd_fidelity(config);
  if (config.command == "sweep-gain") return cmd_sweep_gain(config);
  if (config.command == "universality") return cmd_universality(config);
  if (config.command == "simulate") return cmd_simulate(config);
  if (config.command == "zscan") return cmd_zscan(config);
  throw Error("unknown command: " + config.command);
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  RunConfig config;
  try {
    config = parse_config(args);
  } catch (const HelpRequested& help) {
    std::cout << help.text;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    std::vector<ReportRow> rows = run_command(config);
    for (const std::string& w : config.warnings) std::cerr << "warning: " << w << "\n";
    emit_report(rows, config.report_format(), config.output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace qiopa
