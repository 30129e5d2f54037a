#include "qiopa/detection_sim.hpp"

#include <algorithm>
#include <cmath>

namespace qiopa {

double InjectionModel::overlap_at(double z_query) const {
  if (sigma_z <= 0.0) throw std::invalid_argument("sigma_z must be positive");
  if (p_peak < 0.0 || p_peak > 1.0) throw std::invalid_argument("p_peak must lie in [0, 1]");
  double dz = z_query - z0;
  return p_peak * std::exp(-dz * dz / (2.0 * sigma_z * sigma_z));
}

void ExperimentSetup::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  for (double q : {qe.d2, qe.d2_star, qe.da, qe.db, qe.db_star, qe.dark_rate}) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("detector QE must lie in [0, 1]");
  }
  injection.overlap();  // validates sigma_z and p_peak
}

SamplingTable::SamplingTable(const StateVector& state) {
  if (std::abs(state.squared_norm() - 1.0) > 1e-8) {
    throw std::invalid_argument("sampling table needs a normalized state");
  }
  const FockBasis& basis = state.basis();
  double running = 0.0;
  for (int i = 0; i < basis.dim(); ++i) {
    double p = std::norm(state.amps()[i]);
    if (p == 0.0) continue;
    running += p;
    tuples_.push_back(basis.tuple(i));
    cdf_.push_back(running);
  }
  if (tuples_.empty()) throw Error("sampling table over an empty distribution");
}

const Occupation& SamplingTable::sample(Pcg32& rng) const {
  double u = rng.uniform() * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return tuples_[static_cast<std::size_t>(it - cdf_.begin())];
}

Occupation sample_occupation(const StateVector& state, Pcg32& rng) {
  return SamplingTable(state).sample(rng);
}

ClickPattern route_and_detect(const Occupation& occ, const ExperimentSetup& setup, Pcg32& rng) {
  ClickPattern p;
  // The trigger heralds the presence of the injected photon; vacuum-only
  // diagnostics may force it on.
  p.d_t = setup.source == SourceModel::heralded_qubit ||
          setup.trigger == TriggerModel::always_click;
  const DetectorEfficiencies& qe = setup.qe;

  if (setup.mode == MeasurementMode::cloning) {
    // k1 psi photons: 50:50 splitter, then the transmitted-port analyzers.
    for (int i = 0; i < occ[0]; ++i) {
      bool arm_a = rng.bernoulli(0.5);
      bool detected = rng.bernoulli(arm_a ? qe.da : qe.db);
      if (detected) (arm_a ? p.da : p.db) = true;
    }
    // k1 perp photons: only arm b carries an analyzer output.
    for (int i = 0; i < occ[1]; ++i) {
      bool arm_a = rng.bernoulli(0.5);
      if (!arm_a && rng.bernoulli(qe.db_star)) p.db_star = true;
    }
    // k2: no polarization analysis; everything feeds D2.
    for (int i = 0; i < occ[2] + occ[3]; ++i) {
      if (rng.bernoulli(qe.d2)) p.d2 = true;
    }
  } else {
    // U-NOT: k1 photons hit the splitter with no polarization analysis.
    for (int i = 0; i < occ[0] + occ[1]; ++i) {
      bool arm_a = rng.bernoulli(0.5);
      bool detected = rng.bernoulli(arm_a ? qe.da : qe.db);
      if (detected) (arm_a ? p.da : p.db) = true;
    }
    // k2 analyzer mirrors the trigger filter: perp -> D2, psi -> D2*.
    for (int i = 0; i < occ[2]; ++i) {
      if (rng.bernoulli(qe.d2_star)) p.d2_star = true;
    }
    for (int i = 0; i < occ[3]; ++i) {
      if (rng.bernoulli(qe.d2)) p.d2 = true;
    }
  }

  if (qe.dark_rate > 0.0) {
    // Dark clicks on the detectors present in this mode, in fixed order.
    if (rng.bernoulli(qe.dark_rate)) p.d2 = true;
    if (setup.mode == MeasurementMode::unot && rng.bernoulli(qe.dark_rate)) p.d2_star = true;
    if (rng.bernoulli(qe.dark_rate)) p.da = true;
    if (rng.bernoulli(qe.dark_rate)) p.db = true;
    if (setup.mode == MeasurementMode::cloning && rng.bernoulli(qe.dark_rate)) p.db_star = true;
  }
  return p;
}

TrialEngine::TrialEngine(const ExperimentSetup& setup) : setup_(setup) {
  setup_.validate();
  OpaModel model(setup_.truncation);

  StateVector background = model.evolve(model.vacuum_state(), setup_.g);
  background_ = std::make_unique<SamplingTable>(
      rotate_to_measurement_frame(background, setup_.qubit).state.normalize());

  if (setup_.source == SourceModel::heralded_qubit) {
    StateVector amplified = model.evolve(model.prepare_injected(setup_.qubit), setup_.g);
    amplified_ = std::make_unique<SamplingTable>(
        rotate_to_measurement_frame(amplified, setup_.qubit).state.normalize());
  }
}

CoincidenceCounts TrialEngine::run(std::uint64_t trials, double overlap_prob, std::uint64_t block,
                                   bool use_threads) const {
  const std::int64_t n = static_cast<std::int64_t>(trials);
  std::uint64_t c1 = 0, c2 = 0;
  const bool cloning = setup_.mode == MeasurementMode::cloning;
  const bool heralded = setup_.source == SourceModel::heralded_qubit;

#pragma omp parallel for schedule(static) reduction(+ : c1, c2) if (use_threads)
  for (std::int64_t t = 0; t < n; ++t) {
    Pcg32 rng = substream(setup_.master_seed, block, static_cast<std::uint64_t>(t));

    Occupation occ;
    if (heralded) {
      bool overlapped = rng.bernoulli(overlap_prob);
      if (overlapped) {
        occ = amplified_->sample(rng);
      } else {
        // No pulse overlap: the photon flies through unamplified while the
        // pump still amplifies vacuum; the detectors see both.
        occ = background_->sample(rng);
        occ.n[0] = static_cast<std::uint8_t>(occ.n[0] + 1);
      }
    } else {
      occ = background_->sample(rng);
    }

    ClickPattern p = route_and_detect(occ, setup_, rng);

    if (p.d_t && p.da && p.db) {
      if (cloning) {
        if (p.d2) ++c1;
      } else {
        if (p.d2) ++c1;
        if (p.d2_star) ++c2;
      }
    }
    if (cloning && p.d_t && p.d2 && p.da && p.db_star) ++c2;
  }

  return {c1, c2, trials, setup_.mode};
}

CoincidenceCounts run_trials(const ExperimentSetup& setup) {
  TrialEngine engine(setup);
  return engine.run(setup.trials, setup.injection.overlap(), 0, true);
}

CoincidenceCounts run_trials_serial(const ExperimentSetup& setup) {
  TrialEngine engine(setup);
  return engine.run(setup.trials, setup.injection.overlap(), 0, false);
}

RatioEstimate estimate_R(const CoincidenceCounts& counts) {
  if (counts.c2 == 0) throw Error("R estimate undefined: C2 = 0");
  double factor = counts.mode == MeasurementMode::cloning ? 0.5 : 1.0;
  double c1 = static_cast<double>(counts.c1);
  double c2 = static_cast<double>(counts.c2);
  RatioEstimate est;
  est.value = factor * c1 / c2;
  est.sigma = counts.c1 == 0 ? 0.0 : est.value * std::sqrt(1.0 / c1 + 1.0 / c2);
  return est;
}

RatioEstimate fidelity_from_counts(const CoincidenceCounts& counts) {
  RatioEstimate r = estimate_R(counts);
  RatioEstimate f;
  if (counts.mode == MeasurementMode::cloning) {
    f.value = fidelity_from_ratio(r.value);
    f.sigma = 2.0 / ((2.0 * r.value + 2.0) * (2.0 * r.value + 2.0)) * r.sigma;
  } else {
    f.value = fidelity_star_from_ratio(r.value);
    f.sigma = 1.0 / ((r.value + 1.0) * (r.value + 1.0)) * r.sigma;
  }
  return f;
}

std::vector<ScanPoint> z_scan(const ExperimentSetup& setup, const std::vector<double>& z_values) {
  if (z_values.empty()) throw std::invalid_argument("z scan needs at least one position");
  TrialEngine engine(setup);
  std::vector<ScanPoint> points;
  points.reserve(z_values.size());
  for (std::size_t i = 0; i < z_values.size(); ++i) {
    double eps = setup.injection.overlap_at(z_values[i]);
    points.push_back({z_values[i], engine.run(setup.trials, eps, i + 1, true)});
  }
  return points;
}

}  // namespace qiopa
