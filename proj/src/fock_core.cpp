#include "qiopa/fock_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qiopa {

namespace {

void check_policy(const TruncationPolicy& t) {
  if (t.per_mode_cutoff < 0 || t.total_cutoff < 0) {
    throw std::invalid_argument("truncation cutoffs must be nonnegative");
  }
  if (t.per_mode_cutoff > 200 || t.total_cutoff > 800) {
    throw std::invalid_argument("truncation cutoffs unreasonably large");
  }
}

int spatial_offset(const FockBasis& basis, SpatialMode spatial) {
  if (basis.n_modes() == 2) {
    if (spatial != SpatialMode::k1) {
      throw std::invalid_argument("reduced basis has a single spatial mode");
    }
    return 0;
  }
  return spatial == SpatialMode::k1 ? 0 : 2;
}

// Matrix of a_axis = conj(h) a_H + conj(v) a_V restricted to the truncated
// basis. Annihilation never leaves the basis, so A^dag A is the exact
// projected number operator.
Eigen::MatrixXcd axis_annihilator(const FockBasis& basis, int offset, Complex h, Complex v) {
  const int d = basis.dim();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    const Occupation& occ = basis.tuple(j);
    int nh = occ[offset];
    int nv = occ[offset + 1];
    if (nh >= 1) {
      int i = basis.find(occ.with(offset, nh - 1));
      a(i, j) += std::conj(h) * std::sqrt(static_cast<double>(nh));
    }
    if (nv >= 1) {
      int i = basis.find(occ.with(offset + 1, nv - 1));
      a(i, j) += std::conj(v) * std::sqrt(static_cast<double>(nv));
    }
  }
  return a;
}

}  // namespace

std::string Occupation::to_string() const {
  std::ostringstream out;
  out << "(" << int(n[0]) << "," << int(n[1]) << ";" << int(n[2]) << "," << int(n[3]) << ")";
  return out.str();
}

FockBasis::FockBasis(int n_modes, TruncationPolicy truncation)
    : n_modes_(n_modes), truncation_(truncation) {
  if (n_modes != 2 && n_modes != 4) {
    throw std::invalid_argument("FockBasis supports 2 or 4 modes");
  }
  check_policy(truncation);

  std::array<int, 4> n{0, 0, 0, 0};
  const int per = truncation.per_mode_cutoff;
  const int total = truncation.total_cutoff;
  // Counting loop nests lexicographically; unused trailing modes stay zero.
  for (n[0] = 0; n[0] <= per; ++n[0]) {
    for (n[1] = 0; n[1] <= per && n[0] + n[1] <= total; ++n[1]) {
      if (n_modes == 2) {
        tuples_.emplace_back(n[0], n[1], 0, 0);
        continue;
      }
      for (n[2] = 0; n[2] <= per && n[0] + n[1] + n[2] <= total; ++n[2]) {
        for (n[3] = 0; n[3] <= per && n[0] + n[1] + n[2] + n[3] <= total; ++n[3]) {
          tuples_.emplace_back(n[0], n[1], n[2], n[3]);
        }
      }
    }
  }
  std::sort(tuples_.begin(), tuples_.end());
  index_.reserve(tuples_.size());
  for (std::size_t i = 0; i < tuples_.size(); ++i) {
    index_.emplace(tuples_[i].key(), static_cast<int>(i));
  }
}

bool FockBasis::admits(const Occupation& occ) const {
  for (int m = 0; m < 4; ++m) {
    if (m >= n_modes_ && occ[m] != 0) return false;
    if (occ[m] > truncation_.per_mode_cutoff) return false;
  }
  return occ.total() <= truncation_.total_cutoff;
}

bool FockBasis::is_boundary(const Occupation& occ) const {
  if (occ.total() >= truncation_.total_cutoff - 1) return true;
  for (int m = 0; m < n_modes_; ++m) {
    if (occ[m] >= truncation_.per_mode_cutoff) return true;
  }
  return false;
}

std::vector<Occupation> enumerate_basis(TruncationPolicy truncation, int n_modes) {
  return FockBasis(n_modes, truncation).tuples();
}

StateVector::StateVector(std::shared_ptr<const FockBasis> basis, Eigen::VectorXcd amps)
    : basis_(std::move(basis)), amps_(std::move(amps)) {
  if (amps_.size() != basis_->dim()) {
    throw std::invalid_argument("amplitude vector does not match basis dimension");
  }
}

StateVector StateVector::basis_state(std::shared_ptr<const FockBasis> basis,
                                     const Occupation& occ) {
  StateVector s(std::move(basis));
  int i = s.basis_->find(occ);
  if (i < 0) throw std::invalid_argument("occupation " + occ.to_string() + " outside truncation");
  s.amps_[i] = Complex{1.0, 0.0};
  return s;
}

void StateVector::set_amplitude(const Occupation& occ, Complex value) {
  int i = basis_->find(occ);
  if (i < 0) throw std::invalid_argument("occupation " + occ.to_string() + " outside truncation");
  amps_[i] = value;
}

StateVector& StateVector::normalize() {
  double n = norm();
  if (n <= 0.0) throw Error("cannot normalize a zero state");
  amps_ /= n;
  return *this;
}

double StateVector::boundary_weight() const {
  double w = 0.0;
  for (int i = 0; i < dim(); ++i) {
    if (basis_->is_boundary(basis_->tuple(i))) w += std::norm(amps_[i]);
  }
  return w;
}

StateVector& StateVector::operator+=(const StateVector& other) {
  if (!basis_->compatible(other.basis())) throw std::invalid_argument("basis mismatch");
  amps_ += other.amps_;
  return *this;
}

LadderResult apply_creation(const StateVector& state, Mode mode, OverflowPolicy policy) {
  const FockBasis& basis = state.basis();
  const int m = static_cast<int>(mode);
  if (m >= basis.n_modes()) throw std::invalid_argument("mode outside basis");
  StateVector out(state.basis_ptr());
  double dropped = 0.0;
  for (int j = 0; j < basis.dim(); ++j) {
    Complex c = state.amps()[j];
    if (c == Complex{0.0, 0.0}) continue;
    const Occupation& occ = basis.tuple(j);
    int n = occ[m];
    Complex lifted = c * std::sqrt(static_cast<double>(n + 1));
    int i = basis.find(occ.with(m, n + 1));
    if (i >= 0) {
      out.amps()[i] += lifted;
    } else {
      dropped += std::norm(lifted);
    }
  }
  if (policy == OverflowPolicy::strict && dropped > 0.0) {
    throw TruncationError("creation operator dropped weight " + std::to_string(dropped) +
                          "; cutoff too small");
  }
  return {std::move(out), dropped};
}

LadderResult apply_annihilation(const StateVector& state, Mode mode) {
  const FockBasis& basis = state.basis();
  const int m = static_cast<int>(mode);
  if (m >= basis.n_modes()) throw std::invalid_argument("mode outside basis");
  StateVector out(state.basis_ptr());
  for (int j = 0; j < basis.dim(); ++j) {
    Complex c = state.amps()[j];
    if (c == Complex{0.0, 0.0}) continue;
    const Occupation& occ = basis.tuple(j);
    int n = occ[m];
    if (n == 0) continue;
    int i = basis.find(occ.with(m, n - 1));
    out.amps()[i] += c * std::sqrt(static_cast<double>(n));
  }
  return {std::move(out), 0.0};
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (!a.basis().compatible(b.basis())) {
    throw std::invalid_argument("inner product across mismatched truncations");
  }
  return a.amps().dot(b.amps());
}

DensityMatrix::DensityMatrix(std::shared_ptr<const FockBasis> basis, Eigen::MatrixXcd entries,
                             double success_probability)
    : basis_(std::move(basis)),
      entries_(std::move(entries)),
      success_probability_(success_probability) {
  if (entries_.rows() != basis_->dim() || entries_.cols() != basis_->dim()) {
    throw std::invalid_argument("density matrix does not match basis dimension");
  }
  if (success_probability_ < 0.0 || success_probability_ > 1.0 + 1e-12) {
    throw std::invalid_argument("success probability outside [0, 1]");
  }
}

void DensityMatrix::validate(double hermitian_tol, double eigenvalue_floor,
                             double trace_tol) const {
  double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > hermitian_tol) {
    throw Error("density matrix not Hermitian: deviation " + std::to_string(herm));
  }
  if (std::abs(trace() - 1.0) > trace_tol) {
    throw Error("density matrix trace " + std::to_string(trace()) + " != 1");
  }
  Eigen::VectorXd ev = eigenvalues();
  if (ev.minCoeff() < eigenvalue_floor) {
    throw Error("density matrix has eigenvalue " + std::to_string(ev.minCoeff()));
  }
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::MatrixXcd herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

DensityMatrix density_from_pure(const StateVector& state, OverflowPolicy policy) {
  if (policy == OverflowPolicy::strict && std::abs(state.squared_norm() - 1.0) > 1e-8) {
    throw std::invalid_argument("density_from_pure requires a normalized state");
  }
  Eigen::MatrixXcd rho = state.amps() * state.amps().adjoint();
  return DensityMatrix(state.basis_ptr(), std::move(rho));
}

DensityMatrix partial_trace(const DensityMatrix& rho, SpatialMode keep) {
  const FockBasis& basis = rho.basis();
  if (basis.n_modes() != 4) {
    throw std::invalid_argument("partial trace expects the full 4-mode basis");
  }
  const int keep_off = keep == SpatialMode::k1 ? 0 : 2;
  const int drop_off = keep == SpatialMode::k1 ? 2 : 0;

  auto reduced = FockBasis::make(2, basis.truncation());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(reduced->dim(), reduced->dim());

  const int d = basis.dim();
  for (int i = 0; i < d; ++i) {
    const Occupation& ti = basis.tuple(i);
    int ri = reduced->find(Occupation(ti[keep_off], ti[keep_off + 1], 0, 0));
    for (int j = 0; j < d; ++j) {
      const Occupation& tj = basis.tuple(j);
      if (ti[drop_off] != tj[drop_off] || ti[drop_off + 1] != tj[drop_off + 1]) continue;
      int rj = reduced->find(Occupation(tj[keep_off], tj[keep_off + 1], 0, 0));
      out(ri, rj) += rho.entries()(i, j);
    }
  }
  return DensityMatrix(std::move(reduced), std::move(out), rho.success_probability());
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::VectorXd ev = rho.eigenvalues();
  double s = 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    double lambda = ev[i];
    if (lambda < -1e-10) {
      throw Error("entropy of an indefinite matrix: eigenvalue " + std::to_string(lambda));
    }
    if (lambda <= 0.0) continue;
    s -= lambda * std::log2(lambda);
  }
  return s;
}

double number_expectation(const DensityMatrix& rho, Mode mode) {
  const FockBasis& basis = rho.basis();
  const int m = static_cast<int>(mode);
  if (m >= basis.n_modes()) throw std::invalid_argument("mode outside basis");
  double value = 0.0;
  for (int i = 0; i < basis.dim(); ++i) {
    value += basis.tuple(i)[m] * rho.entries()(i, i).real();
  }
  return value;
}

double number_expectation(const DensityMatrix& rho, SpatialMode spatial, Complex axis_h,
                          Complex axis_v) {
  const FockBasis& basis = rho.basis();
  int offset = spatial_offset(basis, spatial);
  Eigen::MatrixXcd a = axis_annihilator(basis, offset, axis_h, axis_v);
  // Tr(rho A^dag A) = Tr((A rho) A^dag) evaluated without forming A^dag A.
  return (a * rho.entries() * a.adjoint()).trace().real();
}

double total_number_expectation(const DensityMatrix& rho, SpatialMode spatial) {
  const FockBasis& basis = rho.basis();
  int offset = spatial_offset(basis, spatial);
  double value = 0.0;
  for (int i = 0; i < basis.dim(); ++i) {
    const Occupation& occ = basis.tuple(i);
    value += (occ[offset] + occ[offset + 1]) * rho.entries()(i, i).real();
  }
  return value;
}

}  // namespace qiopa
