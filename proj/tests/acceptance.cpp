// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qiopa/cli.hpp"
#include "qiopa/cloning_metrics.hpp"
#include "qiopa/detection_sim.hpp"
#include "qiopa/gaussian_fit.hpp"

using namespace qiopa;

namespace {

struct Result {
  bool ok = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& label) {
    if (!condition) {
      ok = false;
      detail << " [FAILED: " << label << "]";
    }
  }
};

OpaModel& model() {
  static OpaModel m{TruncationPolicy{}};
  return m;
}

constexpr double kOptimalF = 5.0 / 6.0;
constexpr double kOptimalFStar = 2.0 / 3.0;

void criterion_1_cloning_fidelity(Result& r) {
  for (const auto& [name, qubit] : paper_qubits()) {
    FidelityReport rep =
        evaluate_fidelity(model(), qubit, GainParameter(0.1), EvolutionOrder::first);
    r.detail << name << ": F=" << rep.F << "  ";
    r.require(std::abs(rep.F - kOptimalF) <= 1e-10, name + " |F - 5/6| > 1e-10");
  }
}

void criterion_2_unot_fidelity(Result& r) {
  for (const auto& [name, qubit] : paper_qubits()) {
    FidelityReport rep =
        evaluate_fidelity(model(), qubit, GainParameter(0.1), EvolutionOrder::first);
    r.detail << name << ": F*=" << rep.F_star << "  ";
    r.require(std::abs(rep.F_star - kOptimalFStar) <= 1e-10, name + " |F* - 2/3| > 1e-10");
  }
}

void criterion_3_ratio_laws(Result& r) {
  for (const auto& [name, qubit] : paper_qubits()) {
    FidelityReport rep =
        evaluate_fidelity(model(), qubit, GainParameter(0.1), EvolutionOrder::first);
    r.require(std::abs(rep.R - 2.0) <= 1e-10, name + " R != 2");
    r.require(std::abs(rep.R_star - 2.0) <= 1e-10, name + " R* != 2");
    r.require(std::abs(fidelity_from_ratio(rep.R) - kOptimalF) <= 1e-10,
              name + " (2R+1)/(2R+2) != 5/6");
    r.require(std::abs(fidelity_star_from_ratio(rep.R_star) - kOptimalFStar) <= 1e-10,
              name + " R*/(R*+1) != 2/3");
  }
  r.detail << "R = R* = 2 and the closed forms reproduce criteria 1-2";
}

void criterion_4_vacuum_ratio(Result& r) {
  double g = 0.1;
  StateVector injected = model().first_order_output(PolarizationQubit(1.0, 0.0), GainParameter(g));
  StateVector vacuum = model().vacuum_first_order_output(GainParameter(g));
  double w_injected = std::norm(injected.amplitude({2, 0, 0, 1}));
  double w_vacuum = std::norm(vacuum.amplitude({1, 0, 0, 1}));
  double ratio = w_injected / w_vacuum;
  r.detail << "flipped-qubit weight ratio = " << ratio;
  r.require(std::abs(ratio - 2.0) <= 1e-12, "ratio != 2");
}

void criterion_5_universality(Result& r) {
  std::vector<PolarizationQubit> qubits;
  Pcg32 rng = substream(1848, 0, 0);
  for (int i = 0; i < 100; ++i) qubits.push_back(haar_random_qubit(rng));

  UniversalityScan first =
      universality_scan(model(), qubits, GainParameter(0.1), EvolutionOrder::first);
  UniversalityScan full =
      universality_scan(model(), qubits, GainParameter(0.1), EvolutionOrder::full);
  r.detail << "first-order spread F=" << first.max_dev_F << " F*=" << first.max_dev_F_star
           << "; full spread F=" << full.max_dev_F << " F*=" << full.max_dev_F_star;
  r.require(first.max_dev_F <= 1e-10 && first.max_dev_F_star <= 1e-10,
            "first-order spread > 1e-10");
  r.require(full.max_dev_F <= 1e-8 && full.max_dev_F_star <= 1e-8, "full spread > 1e-8");
}

void criterion_6_oracle_equivalence(Result& r) {
  // Two-point convergence of the first-order state against the exact map.
  PolarizationQubit q(1.0, 0.0);
  double e1 = (model().evolve(model().prepare_injected(q), GainParameter(1e-3)).amps() -
               model().first_order_output(q, GainParameter(1e-3)).amps())
                  .norm();
  double e2 = (model().evolve(model().prepare_injected(q), GainParameter(1e-2)).amps() -
               model().first_order_output(q, GainParameter(1e-2)).amps())
                  .norm();
  double order = std::log10(e2 / e1);
  double c_fit = e2 / 1e-4;
  r.detail << "observed order=" << order << " (C~" << c_fit << ")";
  r.require(order >= 1.9, "convergence order < 1.9");
  r.require(e1 <= c_fit * 1e-6 * 1.01, "error not bounded by C g^2");

  // Series evolution versus the dense eigendecomposition oracle on the
  // larger truncation.
  OpaModel big(TruncationPolicy{6, 8});
  Pcg32 rng = substream(6, 0, 0);
  double worst = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    PolarizationQubit qr = rep == 0 ? q : haar_random_qubit(rng);
    StateVector in = big.prepare_injected(qr);
    StateVector series = big.evolve(in, GainParameter(0.1));
    StateVector dense = testing::dense_evolve(in, 0.1);
    worst = std::max(worst, (series.amps() - dense.amps()).cwiseAbs().maxCoeff());
  }
  r.detail << "; dense-oracle max dev=" << worst;
  r.require(worst <= 1e-8, "dense oracle deviation > 1e-8");

  // Context: physical truncation gap between the default and the larger
  // space (informational, not gated).
  StateVector small_out = model().evolve(model().prepare_injected(q), GainParameter(0.1));
  StateVector big_out = big.evolve(big.prepare_injected(q), GainParameter(0.1));
  double gap = 0.0;
  for (int i = 0; i < model().basis()->dim(); ++i) {
    const Occupation& occ = model().basis()->tuple(i);
    gap = std::max(gap,
                   std::abs(small_out.amps()[i] - big_out.amplitude(occ)));
  }
  r.detail << "; truncation gap (4,6)->(6,8)=" << gap;
}

void criterion_7_entropy_symmetry(Result& r) {
  Pcg32 rng = substream(7, 0, 0);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    PolarizationQubit q = haar_random_qubit(rng);
    double g = 0.02 + 0.28 * rng.uniform();
    StateVector out = model().evolve(model().prepare_injected(q), GainParameter(g));
    auto [s1, s2] = entropy_pair(out);
    worst = std::max(worst, std::abs(s1 - s2));
  }
  r.detail << "max |S1 - S2| = " << worst;
  r.require(worst <= 1e-10, "entropy asymmetry > 1e-10");

  PostSelectedState ps = post_select_amplified(
      model().first_order_output(PolarizationQubit(1.0, 0.0), GainParameter(0.1)).normalize());
  auto [s1, s2] = entropy_pair(ps);
  double expected = std::log2(3.0) - 2.0 / 3.0;
  r.detail << "; post-selected S = " << s1;
  r.require(std::abs(s1 - expected) <= 1e-8, "post-selected entropy != log2(3) - 2/3");
  r.require(std::abs(s2 - expected) <= 1e-8, "post-selected entropy (k2) != log2(3) - 2/3");
}

void criterion_8_monte_carlo(Result& r) {
  ExperimentSetup setup;
  setup.mode = MeasurementMode::cloning;
  setup.qubit = PolarizationQubit(1.0, 0.0);
  setup.g = GainParameter(0.1);
  setup.qe = DetectorEfficiencies::uniform(0.55);
  setup.trials = 1000000;
  setup.master_seed = 8;

  CoincidenceCounts counts = run_trials(setup);
  RatioEstimate f_hat = fidelity_from_counts(counts);
  testing::ClickRates rates = testing::expected_click_rates(setup);
  double f_oracle = fidelity_from_ratio(0.5 * rates.c1 / rates.c2);

  r.detail << "F_hat=" << f_hat.value << " +- " << f_hat.sigma << ", oracle=" << f_oracle
           << ", |dev|/sigma=" << std::abs(f_hat.value - f_oracle) / f_hat.sigma;
  r.require(std::abs(f_hat.value - f_oracle) <= 3.0 * f_hat.sigma, "F_hat beyond 3 sigma");
  r.require(f_hat.sigma <= 0.01, "sigma(F_hat) > 0.01");
}

void criterion_9_z_scan(Result& r) {
  ExperimentSetup setup;
  setup.mode = MeasurementMode::cloning;
  setup.qubit = PolarizationQubit(1.0, 0.0);
  setup.g = GainParameter(0.1);
  setup.qe = DetectorEfficiencies::uniform(0.55);
  setup.trials = 60000;
  setup.master_seed = 9;
  setup.injection = {0.0, 0.4, 1.1, 0.9};

  std::vector<double> zs;
  for (int i = 0; i < 21; ++i) zs.push_back(-4.0 + 0.4 * i);
  std::vector<ScanPoint> points = z_scan(setup, zs);

  std::vector<double> c1, c2;
  for (const ScanPoint& p : points) {
    c1.push_back(static_cast<double>(p.counts.c1));
    c2.push_back(static_cast<double>(p.counts.c2));
  }

  GaussianFit signal = fit_gaussian(zs, c1);
  r.detail << "center=" << signal.center << " +- " << signal.sigma_center;
  r.require(signal.converged && !signal.degenerate, "signal fit inconclusive");
  r.require(std::abs(signal.center - setup.injection.z0) <= 3.0 * signal.sigma_center,
            "fitted center misses z0 at 3 sigma");

  // Noise channel: amplitude at the fitted resonance consistent with zero.
  GaussianFit noise = fit_amplitude_at(zs, c2, signal.center, signal.width);
  r.detail << "; noise A=" << noise.amplitude << " +- " << noise.sigma_amplitude;
  r.require(std::abs(noise.amplitude) <= 3.0 * noise.sigma_amplitude,
            "noise channel shows a peak");
}

void criterion_10_experimental_bracket(Result& r) {
  // Measured values (not reproducible here: unmodeled imperfections); the
  // ideal simulation must sit between them and the optimal bounds.
  struct Measured {
    const char* name;
    double f;
    double f_star;
  };
  const Measured measured[] = {
      {"H", 0.812, 0.630}, {"diag", 0.812, 0.625}, {"circ-left", 0.800, 0.618}};

  auto named = paper_qubits();
  for (const Measured& m : measured) {
    PolarizationQubit qubit;
    for (const auto& [name, q] : named) {
      if (name == m.name) qubit = q;
    }
    FidelityReport rep = evaluate_fidelity(model(), qubit, GainParameter(0.1),
                                           EvolutionOrder::full);
    r.detail << m.name << ": F=" << rep.F << " F*=" << rep.F_star << "  ";
    r.require(rep.F >= m.f && rep.F <= kOptimalF + 1e-12,
              std::string(m.name) + " F outside [measured, 5/6]");
    r.require(rep.F_star >= m.f_star && rep.F_star <= kOptimalFStar + 1e-12,
              std::string(m.name) + " F* outside [measured, 2/3]");
  }
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Result&)> run;
  double time_limit_s;  // 0 = no limit stated
};

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "optimal cloning fidelity 5/6 (first order, three inputs)", criterion_1_cloning_fidelity,
       1.0},
      {2, "optimal U-NOT fidelity 2/3 (first order, three inputs)", criterion_2_unot_fidelity,
       1.0},
      {3, "ratio laws R = R* = 2 and closed-form consistency", criterion_3_ratio_laws, 0.0},
      {4, "vacuum signal-to-noise ratio 2:1", criterion_4_vacuum_ratio, 0.0},
      {5, "universality over 100 random qubits", criterion_5_universality, 30.0},
      {6, "oracle equivalence of the exact evolution", criterion_6_oracle_equivalence, 0.0},
      {7, "entanglement entropy symmetry", criterion_7_entropy_symmetry, 0.0},
      {8, "Monte Carlo fidelity vs enumeration oracle", criterion_8_monte_carlo, 60.0},
      {9, "z-scan resonance recovery with flat noise channel", criterion_9_z_scan, 0.0},
      {10, "ideal fidelities bracket the measured values", criterion_10_experimental_bracket, 0.0},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    Result result;
    auto start = std::chrono::steady_clock::now();
    try {
      c.run(result);
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail << " [EXCEPTION: " << e.what() << "]";
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0.0 && elapsed > c.time_limit_s) {
      result.ok = false;
      result.detail << " [over time limit " << c.time_limit_s << "s]";
    }
    std::printf("%s  %2d. %s (%.2fs)\n      %s\n", result.ok ? "PASS" : "FAIL", c.id, c.name,
                elapsed, result.detail.str().c_str());
    failures += result.ok ? 0 : 1;
  }
  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
