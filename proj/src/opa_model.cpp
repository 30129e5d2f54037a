#include "qiopa/opa_model.hpp"

#include <cmath>
#include <vector>

namespace qiopa {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Coefficients of R(qubit) applied to one spatial mode's pair |nh, nv>:
// expand (r00 a_H^+ + r10 a_V^+)^nh (r01 a_H^+ + r11 a_V^+)^nv |0> and
// normalize. Photon count nh + nv is conserved.
std::vector<std::pair<std::pair<int, int>, Complex>> rotate_pair(const Eigen::Matrix2cd& r, int nh,
                                                                 int nv) {
  std::vector<std::pair<std::pair<int, int>, Complex>> terms;
  const int n = nh + nv;
  terms.reserve(static_cast<std::size_t>(n) + 1);
  const double inv_norm = 1.0 / std::sqrt(factorial(nh) * factorial(nv));
  for (int mh = 0; mh <= n; ++mh) {
    Complex coef{0.0, 0.0};
    for (int p = std::max(0, mh - nv); p <= std::min(nh, mh); ++p) {
      int q = mh - p;
      coef += binomial(nh, p) * binomial(nv, q) * std::pow(r(0, 0), p) * std::pow(r(1, 0), nh - p) *
              std::pow(r(0, 1), q) * std::pow(r(1, 1), nv - q);
    }
    if (coef == Complex{0.0, 0.0}) continue;
    coef *= std::sqrt(factorial(mh) * factorial(n - mh)) * inv_norm;
    terms.push_back({{mh, n - mh}, coef});
  }
  return terms;
}

}  // namespace

PolarizationQubit::PolarizationQubit(Complex a, Complex b) : alpha(a), beta(b) {
  double n2 = std::norm(alpha) + std::norm(beta);
  if (std::abs(n2 - 1.0) > 1e-12) {
    throw std::invalid_argument("polarization qubit must have unit norm");
  }
}

PolarizationQubit PolarizationQubit::normalized(Complex a, Complex b) {
  double n = std::sqrt(std::norm(a) + std::norm(b));
  if (n <= 0.0) throw std::invalid_argument("zero polarization vector");
  return PolarizationQubit(a / n, b / n);
}

Eigen::Matrix2cd PolarizationQubit::rotation() const {
  Eigen::Matrix2cd r;
  r << alpha, -std::conj(beta), beta, std::conj(alpha);
  return r;
}

GainParameter::GainParameter(double g) : value(g) {
  if (g < 0.0 || !(g <= kMaxSupported)) {
    throw std::invalid_argument("gain must lie in [0, " + std::to_string(kMaxSupported) + "]");
  }
}

Eigen::SparseMatrix<Complex> build_generator(const FockBasis& basis) {
  if (basis.n_modes() != 4) throw std::invalid_argument("generator needs the 4-mode basis");
  if (basis.truncation().per_mode_cutoff < 2 || basis.truncation().total_cutoff < 3) {
    throw std::invalid_argument("truncation too small for the amplifier (need per_mode >= 2, total >= 3)");
  }

  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(basis.dim()) * 4);
  for (int j = 0; j < basis.dim(); ++j) {
    const Occupation& t = basis.tuple(j);
    const int n0 = t[0], n1 = t[1], n2 = t[2], n3 = t[3];
    // G: raise the (k1H, k2V) pair, minus raise of (k1V, k2H).
    if (int i = basis.find(Occupation(n0 + 1, n1, n2, n3 + 1)); i >= 0) {
      trip.emplace_back(i, j, Complex(std::sqrt(double(n0 + 1) * (n3 + 1)), 0.0));
    }
    if (int i = basis.find(Occupation(n0, n1 + 1, n2 + 1, n3)); i >= 0) {
      trip.emplace_back(i, j, Complex(-std::sqrt(double(n1 + 1) * (n2 + 1)), 0.0));
    }
    // -G^dag: matching pair annihilations.
    if (n0 >= 1 && n3 >= 1) {
      int i = basis.find(Occupation(n0 - 1, n1, n2, n3 - 1));
      trip.emplace_back(i, j, Complex(-std::sqrt(double(n0) * n3), 0.0));
    }
    if (n1 >= 1 && n2 >= 1) {
      int i = basis.find(Occupation(n0, n1 - 1, n2 - 1, n3));
      trip.emplace_back(i, j, Complex(std::sqrt(double(n1) * n2), 0.0));
    }
  }
  Eigen::SparseMatrix<Complex> m(basis.dim(), basis.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

OpaModel::OpaModel(TruncationPolicy truncation)
    : basis_(FockBasis::make(4, truncation)), generator_(build_generator(*basis_)) {
  double max_col = 0.0;
  for (int k = 0; k < generator_.outerSize(); ++k) {
    double col = 0.0;
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(generator_, k); it; ++it) {
      col += std::abs(it.value());
    }
    max_col = std::max(max_col, col);
  }
  one_norm_ = max_col;
}

StateVector OpaModel::prepare_injected(const PolarizationQubit& qubit) const {
  StateVector s(basis_);
  s.set_amplitude(Occupation(1, 0, 0, 0), qubit.alpha);
  s.set_amplitude(Occupation(0, 1, 0, 0), qubit.beta);
  return s;
}

StateVector OpaModel::evolve(const StateVector& input, GainParameter g,
                             EvolveOptions options) const {
  if (!input.basis().compatible(*basis_)) {
    throw std::invalid_argument("input state does not match the model truncation");
  }
  const double scale = g.value * one_norm_;
  const int stages = std::max(1, static_cast<int>(std::ceil(scale)));
  const double r = scale / stages;  // <= 1 by construction
  const double input_norm = input.norm();
  const double stage_tol = options.series_tol / stages;

  Eigen::VectorXcd acc = input.amps();
  for (int stage = 0; stage < stages; ++stage) {
    Eigen::VectorXcd term = acc;
    double coeff_tail = std::exp(r);  // sum_{j>0} r^j / j! <= e^r - 1 < e^r
    int j = 0;
    while (true) {
      ++j;
      if (j > options.max_terms_per_stage) {
        throw ConvergenceError("evolve: series remainder bound not reached");
      }
      term = (generator_ * term).eval();
      term *= g.value / (stages * j);
      acc += term;
      // Rigorous tail: sum_{i>j} r^i/i! <= r^{j+1}/(j+1)! * e^r.
      coeff_tail *= r / j;
      if (coeff_tail * r / (j + 1) * input_norm <= stage_tol) break;
    }
  }

  StateVector out(basis_, std::move(acc));
  if (options.strict_truncation && out.boundary_weight() > options.boundary_tol) {
    throw TruncationError("evolve: output weight " + std::to_string(out.boundary_weight()) +
                          " on truncation boundary");
  }
  return out;
}

StateVector OpaModel::first_order_output(const PolarizationQubit& qubit, GainParameter g) const {
  StateVector in = prepare_injected(qubit);
  // G|in>: both pair terms stay well inside the basis (ctor guarantees
  // per_mode >= 2, total >= 3), so strict application cannot drop weight.
  StateVector term1 =
      apply_creation(apply_creation(in, Mode::k1H, OverflowPolicy::strict).state, Mode::k2V,
                     OverflowPolicy::strict)
          .state;
  StateVector term2 =
      apply_creation(apply_creation(in, Mode::k1V, OverflowPolicy::strict).state, Mode::k2H,
                     OverflowPolicy::strict)
          .state;
  term1 *= Complex{g.value, 0.0};
  term2 *= Complex{-g.value, 0.0};
  in += term1;
  in += term2;
  return in;
}

StateVector OpaModel::vacuum_first_order_output(GainParameter g) const {
  StateVector out = vacuum_state();
  out.set_amplitude(Occupation(1, 0, 0, 1), Complex{g.value, 0.0});
  out.set_amplitude(Occupation(0, 1, 1, 0), Complex{-g.value, 0.0});
  return out;
}

RotationResult rotate_polarization(const StateVector& state, const PolarizationQubit& qubit) {
  const FockBasis& basis = state.basis();
  const Eigen::Matrix2cd r = qubit.rotation();
  StateVector out(state.basis_ptr());

  const int pairs = basis.n_modes() / 2;
  for (int j = 0; j < basis.dim(); ++j) {
    Complex c = state.amps()[j];
    if (c == Complex{0.0, 0.0}) continue;
    const Occupation& occ = basis.tuple(j);

    auto first = rotate_pair(r, occ[0], occ[1]);
    if (pairs == 1) {
      for (const auto& [mh, coef] : first) {
        int i = basis.find(Occupation(mh.first, mh.second, 0, 0));
        if (i >= 0) out.amps()[i] += c * coef;
      }
      continue;
    }
    auto second = rotate_pair(r, occ[2], occ[3]);
    for (const auto& [m1, c1] : first) {
      for (const auto& [m2, c2] : second) {
        int i = basis.find(Occupation(m1.first, m1.second, m2.first, m2.second));
        if (i >= 0) out.amps()[i] += c * c1 * c2;
      }
    }
  }
  // The exact rotation is unitary, so whatever norm is missing was clipped
  // by the per-mode cutoff (total photon count per spatial mode is conserved).
  double dropped = std::max(0.0, state.squared_norm() - out.squared_norm());
  return {std::move(out), dropped};
}

RotationResult rotate_to_measurement_frame(const StateVector& state,
                                           const PolarizationQubit& qubit) {
  return rotate_polarization(state, qubit.inverse_rotation());
}

}  // namespace qiopa
