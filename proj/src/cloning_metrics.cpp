#include "qiopa/cloning_metrics.hpp"

#include <algorithm>
#include <cmath>

namespace qiopa {

namespace {

// Reduced-basis vector for the two-photon state |2 psi, 0> or |1 psi, 1 perp>
// expressed in lab H/V labels.
StateVector two_photon_state(const std::shared_ptr<const FockBasis>& reduced,
                             const PolarizationQubit& qubit, bool both_signal) {
  const Complex a = qubit.alpha, b = qubit.beta;
  StateVector v(reduced);
  if (both_signal) {
    // (a_psi^+)^2 / sqrt(2) |0>
    v.set_amplitude(Occupation(2, 0, 0, 0), a * a);
    v.set_amplitude(Occupation(1, 1, 0, 0), std::sqrt(2.0) * a * b);
    v.set_amplitude(Occupation(0, 2, 0, 0), b * b);
  } else {
    // a_psi^+ a_perp^+ |0> with |perp> = (-conj(b), conj(a))
    const Complex pa = -std::conj(b), pb = std::conj(a);
    v.set_amplitude(Occupation(2, 0, 0, 0), std::sqrt(2.0) * a * pa);
    v.set_amplitude(Occupation(1, 1, 0, 0), a * pb + b * pa);
    v.set_amplitude(Occupation(0, 2, 0, 0), std::sqrt(2.0) * b * pb);
  }
  return v;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

PostSelectedState post_select_amplified(const StateVector& normalized_output) {
  if (std::abs(normalized_output.squared_norm() - 1.0) > 1e-8) {
    throw std::invalid_argument("post-selection expects a normalized output state");
  }
  const FockBasis& basis = normalized_output.basis();
  if (basis.n_modes() != 4) {
    throw std::invalid_argument("post-selection expects the full 4-mode basis");
  }
  StateVector projected(normalized_output.basis_ptr());
  for (int i = 0; i < basis.dim(); ++i) {
    const Occupation& occ = basis.tuple(i);
    if (occ[2] + occ[3] >= 1) projected.amps()[i] = normalized_output.amps()[i];
  }
  double weight = projected.squared_norm();
  if (weight <= 1e-300) {
    throw Error("post-selection has zero amplified weight (no photon reaches k2)");
  }
  projected *= Complex{1.0 / std::sqrt(weight), 0.0};
  return {std::move(projected), weight};
}

double cloning_fidelity(const PostSelectedState& ps, const PolarizationQubit& qubit) {
  DensityMatrix rho1 = partial_trace(ps.density(), SpatialMode::k1);
  double total = total_number_expectation(rho1, SpatialMode::k1);
  if (total <= 1e-300) throw Error("cloning fidelity undefined: no photons on k1");
  return number_expectation(rho1, SpatialMode::k1, qubit.alpha, qubit.beta) / total;
}

double unot_fidelity(const PostSelectedState& ps, const PolarizationQubit& qubit) {
  DensityMatrix rho2 = partial_trace(ps.density(), SpatialMode::k2);
  // Reduced matrices expose their single polarization pair under k1.
  double total = total_number_expectation(rho2, SpatialMode::k1);
  if (total <= 1e-300) throw Error("U-NOT fidelity undefined: no photons on k2");
  PolarizationQubit perp = qubit.orthogonal();
  return number_expectation(rho2, SpatialMode::k1, perp.alpha, perp.beta) / total;
}

double ratio_R(const PostSelectedState& ps, const PolarizationQubit& qubit) {
  DensityMatrix rho1 = partial_trace(ps.density(), SpatialMode::k1);
  StateVector signal_pair = two_photon_state(rho1.basis_ptr(), qubit, true);
  StateVector mixed_pair = two_photon_state(rho1.basis_ptr(), qubit, false);
  double p_signal = (signal_pair.amps().adjoint() * rho1.entries() * signal_pair.amps())(0).real();
  double p_mixed = (mixed_pair.amps().adjoint() * rho1.entries() * mixed_pair.amps())(0).real();
  if (p_mixed <= 1e-300) throw Error("ratio R undefined: vanishing |psi psi_perp> population");
  return p_signal / p_mixed;
}

double ratio_R_star(const PostSelectedState& ps, const PolarizationQubit& qubit) {
  DensityMatrix rho2 = partial_trace(ps.density(), SpatialMode::k2);
  PolarizationQubit perp = qubit.orthogonal();
  double flipped = number_expectation(rho2, SpatialMode::k1, perp.alpha, perp.beta);
  double direct = number_expectation(rho2, SpatialMode::k1, qubit.alpha, qubit.beta);
  if (direct <= 1e-300) throw Error("ratio R* undefined: vanishing psi population on k2");
  return flipped / direct;
}

double fidelity_from_ratio(double r) {
  if (r < 0.0) throw std::invalid_argument("ratio must be nonnegative");
  return (2.0 * r + 1.0) / (2.0 * r + 2.0);
}

double fidelity_star_from_ratio(double r_star) {
  if (r_star < 0.0) throw std::invalid_argument("ratio must be nonnegative");
  return r_star / (r_star + 1.0);
}

std::pair<double, double> entropy_pair(const StateVector& pure_state) {
  DensityMatrix rho = density_from_pure(pure_state);
  double s1 = von_neumann_entropy(partial_trace(rho, SpatialMode::k1));
  double s2 = von_neumann_entropy(partial_trace(rho, SpatialMode::k2));
  return {s1, s2};
}

std::pair<double, double> entropy_pair(const PostSelectedState& ps) {
  return entropy_pair(ps.state);
}

FidelityReport evaluate_fidelity(const OpaModel& model, const PolarizationQubit& qubit,
                                 GainParameter g, EvolutionOrder order) {
  StateVector out = order == EvolutionOrder::first
                        ? model.first_order_output(qubit, g).normalize()
                        : model.evolve(model.prepare_injected(qubit), g);
  PostSelectedState ps = post_select_amplified(out);

  FidelityReport report;
  report.qubit = qubit;
  report.g = g.value;
  report.order = order;
  report.F = cloning_fidelity(ps, qubit);
  report.F_star = unot_fidelity(ps, qubit);
  report.R = ratio_R(ps, qubit);
  report.R_star = ratio_R_star(ps, qubit);
  std::tie(report.S1, report.S2) = entropy_pair(ps);
  report.success_probability = ps.success_probability;
  return report;
}

UniversalityScan universality_scan(const OpaModel& model,
                                   const std::vector<PolarizationQubit>& qubits, GainParameter g,
                                   EvolutionOrder order) {
  if (qubits.empty()) throw std::invalid_argument("universality scan needs at least one qubit");

  UniversalityScan scan;
  scan.reports.resize(qubits.size());
  const std::int64_t n = static_cast<std::int64_t>(qubits.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    scan.reports[static_cast<std::size_t>(i)] =
        evaluate_fidelity(model, qubits[static_cast<std::size_t>(i)], g, order);
  }

  std::vector<double> fs, fss;
  fs.reserve(qubits.size());
  fss.reserve(qubits.size());
  for (const auto& r : scan.reports) {
    fs.push_back(r.F);
    fss.push_back(r.F_star);
  }
  double med_f = median_of(fs), med_fs = median_of(fss);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    scan.max_dev_F = std::max(scan.max_dev_F, std::abs(fs[i] - med_f));
    scan.max_dev_F_star = std::max(scan.max_dev_F_star, std::abs(fss[i] - med_fs));
  }
  return scan;
}

}  // namespace qiopa
