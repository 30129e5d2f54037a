#pragma once

#include <utility>
#include <vector>

#include "qiopa/fock_core.hpp"
#include "qiopa/opa_model.hpp"

namespace qiopa {

/// Amplifier output conditioned on at least one photon in spatial mode k2
/// (the amplification signature the trigger-and-coincidence scheme selects).
struct PostSelectedState {
  StateVector state;  // normalized, support only on k2-occupied tuples
  double success_probability = 0.0;

  DensityMatrix density() const {
    DensityMatrix rho = density_from_pure(state);
    return DensityMatrix(rho.basis_ptr(), rho.entries(), success_probability);
  }
};

/// Throws Error when the k2-occupied weight vanishes (no amplification,
/// e.g. g = 0).
PostSelectedState post_select_amplified(const StateVector& normalized_output);

/// F = Tr(rho1 n_psi) / Tr(rho1 n), photon fraction of the clone mode
/// carrying the injected polarization.
double cloning_fidelity(const PostSelectedState& ps, const PolarizationQubit& qubit);

/// F* = Tr(rho2 n_perp) / Tr(rho2 n) on the flipped-qubit mode.
double unot_fidelity(const PostSelectedState& ps, const PolarizationQubit& qubit);

/// R = P(k1 in |2 psi, 0>) / P(k1 in |1 psi, 1 perp>) from the rotated-basis
/// diagonal of rho1.
double ratio_R(const PostSelectedState& ps, const PolarizationQubit& qubit);

/// R* = Tr(rho2 n_perp) / Tr(rho2 n_psi).
double ratio_R_star(const PostSelectedState& ps, const PolarizationQubit& qubit);

double fidelity_from_ratio(double r);            // (2R + 1) / (2R + 2)
double fidelity_star_from_ratio(double r_star);  // R* / (R* + 1)

/// (S(Tr2 rho), S(Tr1 rho)) in bits for a pure global state.
std::pair<double, double> entropy_pair(const StateVector& pure_state);
std::pair<double, double> entropy_pair(const PostSelectedState& ps);

enum class EvolutionOrder { first, full };

struct FidelityReport {
  PolarizationQubit qubit;
  double g = 0.0;
  EvolutionOrder order = EvolutionOrder::first;
  double F = 0.0;
  double F_star = 0.0;
  double R = 0.0;
  double R_star = 0.0;
  double S1 = 0.0;
  double S2 = 0.0;
  double success_probability = 0.0;
};

/// One-stop evaluation: prepare, evolve (exact or first order), post-select,
/// and compute every figure of merit.
FidelityReport evaluate_fidelity(const OpaModel& model, const PolarizationQubit& qubit,
                                 GainParameter g, EvolutionOrder order);

struct UniversalityScan {
  std::vector<FidelityReport> reports;
  double max_dev_F = 0.0;       // max |F - median F|
  double max_dev_F_star = 0.0;  // max |F* - median F*|
};

/// Evaluates every qubit (order-independent, parallel over entries) and
/// reports the spread around the medians.
UniversalityScan universality_scan(const OpaModel& model,
                                   const std::vector<PolarizationQubit>& qubits, GainParameter g,
                                   EvolutionOrder order);

}  // namespace qiopa
