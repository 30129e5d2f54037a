#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace qiopa {

using Complex = std::complex<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Strict-mode signal: amplitude was pushed past the configured cutoffs.
struct TruncationError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  using Error::Error;
};

/// The four lab-frame modes. Spatial mode k1 carries the clone pair,
/// k2 the flipped-qubit output.
enum class Mode : int { k1H = 0, k1V = 1, k2H = 2, k2V = 3 };

enum class SpatialMode : int { k1 = 0, k2 = 1 };

struct TruncationPolicy {
  int per_mode_cutoff = 4;
  int total_cutoff = 6;

  friend bool operator==(const TruncationPolicy&, const TruncationPolicy&) = default;
};

/// Photon numbers per mode. Slots beyond a basis' mode count stay zero.
struct Occupation {
  std::array<std::uint8_t, 4> n{0, 0, 0, 0};

  Occupation() = default;
  Occupation(int n0, int n1, int n2, int n3)
      : n{static_cast<std::uint8_t>(n0), static_cast<std::uint8_t>(n1),
          static_cast<std::uint8_t>(n2), static_cast<std::uint8_t>(n3)} {}

  int operator[](int mode) const { return n[static_cast<std::size_t>(mode)]; }
  int at(Mode m) const { return n[static_cast<std::size_t>(m)]; }
  int total() const { return n[0] + n[1] + n[2] + n[3]; }

  std::uint32_t key() const {
    return static_cast<std::uint32_t>(n[0]) | static_cast<std::uint32_t>(n[1]) << 8 |
           static_cast<std::uint32_t>(n[2]) << 16 | static_cast<std::uint32_t>(n[3]) << 24;
  }

  Occupation with(int mode, int count) const {
    Occupation copy = *this;
    copy.n[static_cast<std::size_t>(mode)] = static_cast<std::uint8_t>(count);
    return copy;
  }

  friend auto operator<=>(const Occupation& a, const Occupation& b) { return a.n <=> b.n; }
  friend bool operator==(const Occupation& a, const Occupation& b) { return a.n == b.n; }

  std::string to_string() const;
};

/// Truncated occupation basis over `n_modes` bosonic modes, ordered
/// lexicographically by (n0, n1, n2, n3). Immutable once built; share via
/// shared_ptr across states and threads.
class FockBasis {
 public:
  FockBasis(int n_modes, TruncationPolicy truncation);

  static std::shared_ptr<const FockBasis> make(int n_modes, TruncationPolicy truncation) {
    return std::make_shared<const FockBasis>(n_modes, truncation);
  }

  int n_modes() const { return n_modes_; }
  int dim() const { return static_cast<int>(tuples_.size()); }
  const TruncationPolicy& truncation() const { return truncation_; }
  const std::vector<Occupation>& tuples() const { return tuples_; }
  const Occupation& tuple(int i) const { return tuples_[static_cast<std::size_t>(i)]; }

  /// Index of a tuple, or -1 when it lies outside the truncation.
  int find(const Occupation& occ) const {
    auto it = index_.find(occ.key());
    return it == index_.end() ? -1 : it->second;
  }
  bool contains(const Occupation& occ) const { return find(occ) >= 0; }

  /// Admissibility check independent of the enumeration.
  bool admits(const Occupation& occ) const;

  /// True when a single creation on any mode could leave the basis, or a
  /// pair creation could cross the total cutoff.
  bool is_boundary(const Occupation& occ) const;

  bool compatible(const FockBasis& other) const {
    return n_modes_ == other.n_modes_ && truncation_ == other.truncation_;
  }

 private:
  int n_modes_;
  TruncationPolicy truncation_;
  std::vector<Occupation> tuples_;
  std::unordered_map<std::uint32_t, int> index_;
};

/// Mirrors the basis construction as a standalone enumeration.
std::vector<Occupation> enumerate_basis(TruncationPolicy truncation, int n_modes = 4);

/// Complex amplitudes over a truncated occupation basis.
class StateVector {
 public:
  explicit StateVector(std::shared_ptr<const FockBasis> basis)
      : basis_(std::move(basis)), amps_(Eigen::VectorXcd::Zero(basis_->dim())) {}

  StateVector(std::shared_ptr<const FockBasis> basis, Eigen::VectorXcd amps);

  static StateVector basis_state(std::shared_ptr<const FockBasis> basis, const Occupation& occ);
  static StateVector vacuum(std::shared_ptr<const FockBasis> basis) {
    return basis_state(std::move(basis), Occupation{});
  }

  const FockBasis& basis() const { return *basis_; }
  const std::shared_ptr<const FockBasis>& basis_ptr() const { return basis_; }
  const Eigen::VectorXcd& amps() const { return amps_; }
  Eigen::VectorXcd& amps() { return amps_; }
  int dim() const { return static_cast<int>(amps_.size()); }

  Complex amplitude(const Occupation& occ) const {
    int i = basis_->find(occ);
    return i < 0 ? Complex{0.0, 0.0} : amps_[i];
  }
  void set_amplitude(const Occupation& occ, Complex value);

  double squared_norm() const { return amps_.squaredNorm(); }
  double norm() const { return amps_.norm(); }

  /// Scales to unit norm; afterwards squared_norm() == 1 to 1e-12.
  StateVector& normalize();

  /// Probability weight sitting on boundary tuples (truncation health probe).
  double boundary_weight() const;

  StateVector& operator+=(const StateVector& other);
  StateVector& operator*=(Complex scale) {
    amps_ *= scale;
    return *this;
  }

 private:
  std::shared_ptr<const FockBasis> basis_;
  Eigen::VectorXcd amps_;
};

enum class OverflowPolicy { report, strict };

/// Ladder-operator application result. `dropped_weight` is the squared norm
/// lost to tuples outside the truncation (creation only).
struct LadderResult {
  StateVector state;
  double dropped_weight = 0.0;
};

LadderResult apply_creation(const StateVector& state, Mode mode,
                            OverflowPolicy policy = OverflowPolicy::report);
LadderResult apply_annihilation(const StateVector& state, Mode mode);

/// Conjugate-linear in the first argument. Throws on truncation mismatch.
Complex inner_product(const StateVector& a, const StateVector& b);

/// Hermitian PSD matrix over a truncated basis (trace 1 after renormalize).
class DensityMatrix {
 public:
  DensityMatrix(std::shared_ptr<const FockBasis> basis, Eigen::MatrixXcd entries,
                double success_probability = 1.0);

  const FockBasis& basis() const { return *basis_; }
  const std::shared_ptr<const FockBasis>& basis_ptr() const { return basis_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  double success_probability() const { return success_probability_; }

  double trace() const { return entries_.trace().real(); }

  /// Enforces the Hermiticity / PSD / unit-trace invariants, throwing on
  /// violations beyond the stated tolerances.
  void validate(double hermitian_tol = 1e-12, double eigenvalue_floor = -1e-10,
                double trace_tol = 1e-10) const;

  /// Eigenvalues ascending, from the Hermitian part.
  Eigen::VectorXd eigenvalues() const;

 private:
  std::shared_ptr<const FockBasis> basis_;
  Eigen::MatrixXcd entries_;
  double success_probability_;
};

/// Rank-1 projector |psi><psi|. Requires unit norm to 1e-8 unless `policy`
/// is report, in which case the outer product is taken as-is.
DensityMatrix density_from_pure(const StateVector& state,
                                OverflowPolicy policy = OverflowPolicy::strict);

/// Traces out the complementary spatial mode of a 4-mode density matrix,
/// leaving a 2-mode (H,V) matrix for `keep`.
DensityMatrix partial_trace(const DensityMatrix& rho, SpatialMode keep);

/// -sum lambda_i log2 lambda_i, with 0 log 0 = 0. Eigenvalues in
/// [-1e-10, 0) are clamped to zero; anything lower throws.
double von_neumann_entropy(const DensityMatrix& rho);

/// Tr(rho n_mode) for a single lab-frame mode.
double number_expectation(const DensityMatrix& rho, Mode mode);

/// Tr(rho a_axis^dag a_axis) where a_axis = conj(axis_h) a_H + conj(axis_v) a_V
/// on the polarization pair of `spatial`. The axis need not be normalized
/// here; callers pass qubit components.
double number_expectation(const DensityMatrix& rho, SpatialMode spatial, Complex axis_h,
                          Complex axis_v);

/// Tr(rho (n_H + n_V)) on a spatial mode.
double total_number_expectation(const DensityMatrix& rho, SpatialMode spatial);

}  // namespace qiopa
