#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "qiopa/cloning_metrics.hpp"
#include "qiopa/gaussian_fit.hpp"
#include "qiopa/opa_model.hpp"
#include "qiopa/rng.hpp"

namespace qiopa {

enum class MeasurementMode { cloning, unot };

/// How the trigger detector behaves. `herald` ties D_T to the presence of an
/// injected photon; `always_click` is a diagnostic override for vacuum-only
/// runs.
enum class TriggerModel { herald, always_click };

/// What enters the crystal. `heralded_qubit`: every counted trial carries the
/// injected photon, and the pump overlap decides whether it is amplified.
/// `vacuum_only`: no injected photon at all (spontaneous emission only).
enum class SourceModel { heralded_qubit, vacuum_only };

struct DetectorEfficiencies {
  double d2 = 0.55;
  double d2_star = 0.55;
  double da = 0.55;
  double db = 0.55;
  double db_star = 0.55;
  double dark_rate = 0.0;  // per-detector dark-click probability per trial

  static DetectorEfficiencies uniform(double qe) { return {qe, qe, qe, qe, qe, 0.0}; }
};

/// Pump/injection pulse overlap as a function of the pump-mirror position.
struct InjectionModel {
  double z = 0.0;
  double z0 = 0.0;
  double sigma_z = 1.0;
  double p_peak = 1.0;

  double overlap_at(double z_query) const;
  double overlap() const { return overlap_at(z); }
};

struct ExperimentSetup {
  MeasurementMode mode = MeasurementMode::cloning;
  PolarizationQubit qubit;
  GainParameter g{0.1};
  TruncationPolicy truncation;
  DetectorEfficiencies qe;
  InjectionModel injection;
  SourceModel source = SourceModel::heralded_qubit;
  TriggerModel trigger = TriggerModel::herald;
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;

  void validate() const;
};

struct ClickPattern {
  bool d_t = false;
  bool d2 = false;
  bool d2_star = false;
  bool da = false;
  bool db = false;
  bool db_star = false;
};

struct CoincidenceCounts {
  std::uint64_t c1 = 0;
  std::uint64_t c2 = 0;
  std::uint64_t trials_run = 0;
  MeasurementMode mode = MeasurementMode::cloning;
};

/// Born-rule sampler over a normalized state's occupation distribution.
/// Built once, then shared read-only across trials.
class SamplingTable {
 public:
  explicit SamplingTable(const StateVector& state);

  const Occupation& sample(Pcg32& rng) const;

 private:
  std::vector<Occupation> tuples_;
  std::vector<double> cdf_;
};

/// One Born-rule draw from `state` (normalized to 1e-8).
Occupation sample_occupation(const StateVector& state, Pcg32& rng);

/// Optical routing and detection for one trial. `occ` is the occupation in
/// the measurement frame (slot order: k1 psi, k1 perp, k2 psi, k2 perp).
/// Draw order per photon group: k1 psi (arm, detect), k1 perp, k2 psi, k2
/// perp — documented so substreams replay identically.
ClickPattern route_and_detect(const Occupation& occ, const ExperimentSetup& setup, Pcg32& rng);

/// Trial engine: evolves the amplified and background outputs once per
/// (qubit, g), rotates them into the measurement frame, and exposes
/// block-seeded tally runs. Thread-safe after construction.
class TrialEngine {
 public:
  explicit TrialEngine(const ExperimentSetup& setup);

  /// Runs `trials` trials at the given pump overlap probability. `block`
  /// namespaces the per-trial substreams. Identical inputs give identical
  /// counts no matter the thread count.
  CoincidenceCounts run(std::uint64_t trials, double overlap_prob, std::uint64_t block,
                        bool use_threads) const;

  const ExperimentSetup& setup() const { return setup_; }

 private:
  ExperimentSetup setup_;
  std::unique_ptr<SamplingTable> amplified_;
  std::unique_ptr<SamplingTable> background_;
};

/// Monte Carlo 4-coincidence run at the setup's own mirror position.
CoincidenceCounts run_trials(const ExperimentSetup& setup);
/// Serial reference implementation; must reproduce run_trials exactly.
CoincidenceCounts run_trials_serial(const ExperimentSetup& setup);

struct RatioEstimate {
  double value = 0.0;
  double sigma = 0.0;
};

/// R = C1 / (2 C2) for cloning counts, R* = C1 / C2 for U-NOT counts, with
/// Poisson-propagated standard error. Throws when C2 = 0.
RatioEstimate estimate_R(const CoincidenceCounts& counts);

/// Fidelity through the closed-form ratio maps, with the propagated error.
RatioEstimate fidelity_from_counts(const CoincidenceCounts& counts);

struct ScanPoint {
  double z = 0.0;
  CoincidenceCounts counts;
};

/// run_trials at every mirror position, with per-point substream blocks.
std::vector<ScanPoint> z_scan(const ExperimentSetup& setup, const std::vector<double>& z_values);

}  // namespace qiopa
