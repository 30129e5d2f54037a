#pragma once

#include <span>

#include "qiopa/fock_core.hpp"

namespace qiopa {

/// Least-squares fit of a(z) = A exp(-(z - c)^2 / (2 w^2)) + B.
struct GaussianFit {
  double amplitude = 0.0;
  double center = 0.0;
  double width = 0.0;
  double offset = 0.0;
  double sigma_amplitude = 0.0;
  double sigma_center = 0.0;
  double sigma_width = 0.0;
  double sigma_offset = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;  // data flat within machine noise; amplitude pinned to 0
};

/// Damped (Levenberg-Marquardt style) iteration; converged when the relative
/// step drops below 1e-8, erroring out after 200 iterations. Needs >= 5 points.
GaussianFit fit_gaussian(std::span<const double> z, std::span<const double> counts);

/// Amplitude/offset-only fit with the peak position and width held fixed:
/// linear least squares, used to ask whether a channel shows a peak at a
/// known resonance.
GaussianFit fit_amplitude_at(std::span<const double> z, std::span<const double> counts,
                             double center, double width);

}  // namespace qiopa
