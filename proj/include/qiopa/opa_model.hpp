#pragma once

#include <memory>

#include <Eigen/Sparse>

#include "qiopa/fock_core.hpp"

namespace qiopa {

/// |psi> = alpha|H> + beta|V>, unit norm to 1e-12.
struct PolarizationQubit {
  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};

  PolarizationQubit() = default;
  PolarizationQubit(Complex a, Complex b);

  static PolarizationQubit normalized(Complex a, Complex b);

  /// |psi_perp> = -conj(beta)|H> + conj(alpha)|V>; exactly orthogonal.
  PolarizationQubit orthogonal() const { return {-std::conj(beta), std::conj(alpha)}; }

  /// Qubit whose rotation matrix is the adjoint of this one's.
  PolarizationQubit inverse_rotation() const { return {std::conj(alpha), -beta}; }

  /// Column-major SU(2) matrix mapping H -> psi, V -> psi_perp.
  Eigen::Matrix2cd rotation() const;
};

/// Dimensionless interaction strength g = chi * t.
struct GainParameter {
  double value = 0.0;

  GainParameter() = default;
  explicit GainParameter(double g);

  static constexpr double kMaxSupported = 1.0;
  static constexpr double kLinearRegime = 0.3;

  /// Past the perturbative comfort zone; callers may warn.
  bool beyond_linear_regime() const { return value > kLinearRegime; }
};

struct EvolveOptions {
  double series_tol = 1e-12;       // rigorous remainder bound on the output
  int max_terms_per_stage = 64;    // series length guard
  bool strict_truncation = false;  // error when output touches the cutoffs
  double boundary_tol = 1e-12;
};

/// The amplifier interaction in the lab frame on a truncated basis:
/// generator() returns M = G - G^dag with
///   G = a^+_{k1H} b^+_{k2V} - a^+_{k1V} b^+_{k2H},
/// anti-Hermitian by construction, so exp(g M) is unitary on the basis.
/// The same creation-pair form holds in any polarization frame, which is
/// what makes the amplifier insensitive to the injected qubit.
class OpaModel {
 public:
  explicit OpaModel(TruncationPolicy truncation);

  const std::shared_ptr<const FockBasis>& basis() const { return basis_; }
  const Eigen::SparseMatrix<Complex>& generator() const { return generator_; }
  double generator_one_norm() const { return one_norm_; }

  /// alpha|1,0;0,0> + beta|0,1;0,0>: single photon on k1, vacuum on k2.
  StateVector prepare_injected(const PolarizationQubit& qubit) const;
  StateVector vacuum_state() const { return StateVector::vacuum(basis_); }

  /// exp(g M) applied by scaled-and-squared truncated Taylor series with a
  /// computable remainder bound <= options.series_tol.
  StateVector evolve(const StateVector& input, GainParameter g, EvolveOptions options = {}) const;

  /// (1 + g G)|psi_in>: the three-term amplified state, unnormalized.
  StateVector first_order_output(const PolarizationQubit& qubit, GainParameter g) const;

  /// (1 + g G)|vac>: vacuum plus one spontaneous pair, unnormalized.
  StateVector vacuum_first_order_output(GainParameter g) const;

 private:
  std::shared_ptr<const FockBasis> basis_;
  Eigen::SparseMatrix<Complex> generator_;
  double one_norm_;
};

/// Standalone generator assembly (what OpaModel builds internally).
Eigen::SparseMatrix<Complex> build_generator(const FockBasis& basis);

struct RotationResult {
  StateVector state;
  double dropped_weight = 0.0;  // per-mode cutoff clipping; total count is conserved
};

/// Applies the qubit's SU(2) rotation (H -> psi, V -> psi_perp) to the
/// polarization pair of every spatial mode.
RotationResult rotate_polarization(const StateVector& state, const PolarizationQubit& qubit);

/// Re-expresses a lab-frame state in the qubit's measurement frame
/// (slot H carries psi, slot V carries psi_perp afterwards).
RotationResult rotate_to_measurement_frame(const StateVector& state,
                                           const PolarizationQubit& qubit);

}  // namespace qiopa
