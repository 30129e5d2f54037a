#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qiopa/opa_model.hpp"

using namespace qiopa;

namespace {

PolarizationQubit random_qubit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double theta = std::acos(1.0 - 2.0 * uni(rng));
  double phase = 2.0 * M_PI * uni(rng);
  return PolarizationQubit(std::cos(theta / 2.0),
                           std::sin(theta / 2.0) * Complex(std::cos(phase), std::sin(phase)));
}

}  // namespace

TEST_CASE("polarization qubit conventions") {
  CHECK_THROWS_AS(PolarizationQubit(Complex{1.0, 0.0}, Complex{0.5, 0.0}), std::invalid_argument);

  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    PolarizationQubit q = random_qubit(rng);
    PolarizationQubit perp = q.orthogonal();
    Complex overlap = std::conj(q.alpha) * perp.alpha + std::conj(q.beta) * perp.beta;
    CHECK(overlap == Complex{0.0, 0.0});

    Eigen::Matrix2cd r = q.rotation();
    CHECK((r * r.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    Eigen::Matrix2cd rinv = q.inverse_rotation().rotation();
    CHECK((rinv - r.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("gain parameter guard rails") {
  CHECK_THROWS_AS(GainParameter(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(GainParameter(1.5), std::invalid_argument);
  CHECK(!GainParameter(0.1).beyond_linear_regime());
  CHECK(GainParameter(0.4).beyond_linear_regime());
}

TEST_CASE("generator: pair-creation entries and anti-Hermiticity") {
  OpaModel model(TruncationPolicy{});
  const FockBasis& basis = *model.basis();
  Eigen::MatrixXcd m = model.generator();

  int vac = basis.find({0, 0, 0, 0});
  CHECK(m(basis.find({1, 0, 0, 1}), vac) == Complex{1.0, 0.0});
  CHECK(m(basis.find({0, 1, 1, 0}), vac) == Complex{-1.0, 0.0});

  CHECK((m + m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);

  // Independent dense assembly must agree entry for entry.
  CHECK((m - testing::dense_generator(basis)).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(OpaModel(TruncationPolicy{1, 6}), std::invalid_argument);
  CHECK_THROWS_AS(OpaModel(TruncationPolicy{2, 2}), std::invalid_argument);
}

TEST_CASE("evolve: identity at g = 0 and first-order amplitudes") {
  OpaModel model(TruncationPolicy{});
  StateVector in = model.prepare_injected(PolarizationQubit(1.0, 0.0));

  StateVector frozen = model.evolve(in, GainParameter(0.0));
  CHECK((frozen.amps() - in.amps()).norm() < 1e-15);

  double g = 1e-3;
  StateVector out = model.evolve(in, GainParameter(g));
  CHECK(std::abs(out.amplitude({1, 0, 0, 0}) - Complex{1.0, 0.0}) < 5e-6);
  CHECK(std::abs(out.amplitude({2, 0, 0, 1}) - Complex{std::sqrt(2.0) * g, 0.0}) < 5e-6);
  CHECK(std::abs(out.amplitude({1, 1, 1, 0}) - Complex{-g, 0.0}) < 5e-6);
}

TEST_CASE("evolve matches the dense eigendecomposition oracle") {
  std::mt19937_64 rng(7);
  for (TruncationPolicy pol : {TruncationPolicy{4, 6}, TruncationPolicy{6, 8}}) {
    OpaModel model(pol);
    StateVector injected = model.prepare_injected(PolarizationQubit(1.0, 0.0));
    StateVector expected = testing::dense_evolve(injected, 0.1);
    StateVector got = model.evolve(injected, GainParameter(0.1));
    CHECK((got.amps() - expected.amps()).cwiseAbs().maxCoeff() < 1e-12);

    StateVector psi = testing::random_state(model.basis(), rng);
    StateVector expected_r = testing::dense_evolve(psi, 0.23);
    StateVector got_r = model.evolve(psi, GainParameter(0.23));
    CHECK((got_r.amps() - expected_r.amps()).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("evolve preserves norm and composes as a one-parameter group") {
  OpaModel model(TruncationPolicy{});
  std::mt19937_64 rng(13);
  for (double g : {0.05, 0.2, 0.3}) {
    StateVector psi = testing::random_state(model.basis(), rng);
    StateVector out = model.evolve(psi, GainParameter(g));
    CHECK(std::abs(out.norm() - 1.0) < 1e-10);
  }

  StateVector psi = testing::random_state(model.basis(), rng);
  StateVector two_step = model.evolve(model.evolve(psi, GainParameter(0.07)), GainParameter(0.05));
  StateVector one_step = model.evolve(psi, GainParameter(0.12));
  CHECK((two_step.amps() - one_step.amps()).norm() < 1e-9);
}

TEST_CASE("evolve: strict truncation flags boundary contact") {
  OpaModel model(TruncationPolicy{2, 3});
  StateVector in = model.prepare_injected(PolarizationQubit(1.0, 0.0));
  EvolveOptions strict;
  strict.strict_truncation = true;
  CHECK_THROWS_AS(model.evolve(in, GainParameter(0.2), strict), TruncationError);

  // Loose boundary tolerance lets the same evolution through.
  strict.boundary_tol = 1.0;
  CHECK_NOTHROW(model.evolve(in, GainParameter(0.2), strict));
}

TEST_CASE("prepare_injected for the three injected states") {
  OpaModel model(TruncationPolicy{});
  StateVector h = model.prepare_injected(PolarizationQubit(1.0, 0.0));
  CHECK(h.amplitude({1, 0, 0, 0}) == Complex{1.0, 0.0});

  double s = std::sqrt(0.5);
  StateVector diag = model.prepare_injected(PolarizationQubit(s, s));
  CHECK(std::abs(diag.amplitude({1, 0, 0, 0}) - s) < 1e-15);
  CHECK(std::abs(diag.amplitude({0, 1, 0, 0}) - s) < 1e-15);

  StateVector circ = model.prepare_injected(PolarizationQubit(s, Complex{0.0, s}));
  CHECK(std::abs(circ.amplitude({0, 1, 0, 0}) - Complex{0.0, s}) < 1e-15);
}

TEST_CASE("first-order output: exact three-term state") {
  OpaModel model(TruncationPolicy{});
  double g = 0.1;
  StateVector out = model.first_order_output(PolarizationQubit(1.0, 0.0), GainParameter(g));
  CHECK(out.amplitude({1, 0, 0, 0}) == Complex{1.0, 0.0});
  CHECK(std::abs(out.amplitude({2, 0, 0, 1}) - Complex{std::sqrt(2.0) * g, 0.0}) < 1e-15);
  CHECK(std::abs(out.amplitude({1, 1, 1, 0}) - Complex{-g, 0.0}) < 1e-15);
  CHECK(std::abs(out.squared_norm() - (1.0 + 3.0 * g * g)) < 1e-14);

  StateVector still = model.first_order_output(PolarizationQubit(1.0, 0.0), GainParameter(0.0));
  CHECK((still.amps() - model.prepare_injected(PolarizationQubit(1.0, 0.0)).amps()).norm() == 0.0);
}

TEST_CASE("first-order output converges to evolve at second order") {
  OpaModel model(TruncationPolicy{});
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 3; ++rep) {
    PolarizationQubit q = rep == 0 ? PolarizationQubit(1.0, 0.0) : random_qubit(rng);
    double e1 = (model.evolve(model.prepare_injected(q), GainParameter(1e-3)).amps() -
                 model.first_order_output(q, GainParameter(1e-3)).amps())
                    .norm();
    double e2 = (model.evolve(model.prepare_injected(q), GainParameter(1e-2)).amps() -
                 model.first_order_output(q, GainParameter(1e-2)).amps())
                    .norm();
    double order = std::log10(e2 / e1);
    CHECK(order >= 1.9);
    CHECK(e2 <= 10.0 * 1e-4);  // error stays O(g^2) with a modest constant
  }
}

TEST_CASE("vacuum first-order output and the 2:1 ratio") {
  OpaModel model(TruncationPolicy{});
  double g = 0.08;

  StateVector vac0 = model.vacuum_first_order_output(GainParameter(0.0));
  CHECK(vac0.amplitude({0, 0, 0, 0}) == Complex{1.0, 0.0});
  CHECK(vac0.squared_norm() == 1.0);

  StateVector vac = model.vacuum_first_order_output(GainParameter(g));
  StateVector injected = model.first_order_output(PolarizationQubit(1.0, 0.0), GainParameter(g));
  // Flipped-qubit term: psi_perp photon on k2 (psi = H, so perp -> slot k2V).
  double w_injected = std::norm(injected.amplitude({2, 0, 0, 1}));
  double w_vacuum = std::norm(vac.amplitude({1, 0, 0, 1}));
  CHECK(w_injected / w_vacuum == doctest::Approx(2.0).epsilon(1e-14));

  // Agreement with the exact evolution to O(g^2).
  double e1 = (model.evolve(model.vacuum_state(), GainParameter(1e-3)).amps() -
               model.vacuum_first_order_output(GainParameter(1e-3)).amps())
                  .norm();
  double e2 = (model.evolve(model.vacuum_state(), GainParameter(1e-2)).amps() -
               model.vacuum_first_order_output(GainParameter(1e-2)).amps())
                  .norm();
  CHECK(std::log10(e2 / e1) >= 1.9);
}

TEST_CASE("polarization rotation: identity, inverse, and norm") {
  OpaModel model(TruncationPolicy{});
  std::mt19937_64 rng(29);
  StateVector psi = model.evolve(model.prepare_injected(random_qubit(rng)), GainParameter(0.1));

  RotationResult id = rotate_polarization(psi, PolarizationQubit(1.0, 0.0));
  CHECK((id.state.amps() - psi.amps()).norm() < 1e-15);
  CHECK(id.dropped_weight == 0.0);

  for (int rep = 0; rep < 5; ++rep) {
    PolarizationQubit q = random_qubit(rng);
    RotationResult fwd = rotate_polarization(psi, q);
    CHECK(fwd.dropped_weight < 1e-12);  // low photon content never clips here
    RotationResult back = rotate_polarization(fwd.state, q.inverse_rotation());
    CHECK((back.state.amps() - psi.amps()).norm() < 1e-12);
    CHECK(std::abs(fwd.state.squared_norm() - psi.squared_norm()) < 1e-12);
  }
}

TEST_CASE("generator is invariant under simultaneous polarization rotations") {
  // With per_mode == total the truncation is rotation-invariant, so the
  // conjugated generator must match entry for entry.
  OpaModel model(TruncationPolicy{4, 4});
  const FockBasis& basis = *model.basis();
  Eigen::MatrixXcd m = model.generator();

  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 3; ++rep) {
    PolarizationQubit q = random_qubit(rng);
    Eigen::MatrixXcd conjugated(basis.dim(), basis.dim());
    for (int j = 0; j < basis.dim(); ++j) {
      StateVector e = StateVector::basis_state(model.basis(), basis.tuple(j));
      StateVector rotated = rotate_polarization(e, q).state;
      Eigen::VectorXcd m_rot = m * rotated.amps();
      StateVector back =
          rotate_polarization(StateVector(model.basis(), m_rot), q.inverse_rotation()).state;
      conjugated.col(j) = back.amps();
    }
    CHECK((conjugated - m).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("rotation clips per-mode overflow and reports the weight") {
  // (3,3) photons on k1 with per_mode 4 but total 6: a 45-degree rotation
  // pushes weight onto |6,0> / |0,6>, which the per-mode cutoff excludes.
  auto basis = FockBasis::make(4, TruncationPolicy{4, 6});
  StateVector corner = StateVector::basis_state(basis, {3, 3, 0, 0});
  double s = std::sqrt(0.5);
  RotationResult rot = rotate_polarization(corner, PolarizationQubit(s, s));
  CHECK(rot.dropped_weight > 0.1);
  CHECK(std::abs(rot.state.squared_norm() + rot.dropped_weight - 1.0) < 1e-12);
}

TEST_CASE("evolve series guard trips when tolerance is unreachable") {
  OpaModel model(TruncationPolicy{});
  StateVector in = model.prepare_injected(PolarizationQubit(1.0, 0.0));
  EvolveOptions opts;
  opts.max_terms_per_stage = 2;
  CHECK_THROWS_AS(model.evolve(in, GainParameter(0.9), opts), ConvergenceError);
}
