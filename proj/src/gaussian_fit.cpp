#include "qiopa/gaussian_fit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace qiopa {

namespace {

void residuals_and_jacobian(std::span<const double> z, std::span<const double> y,
                            const Eigen::Vector4d& p, Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
  const double a = p[0], c = p[1], w = p[2], b = p[3];
  const int n = static_cast<int>(z.size());
  for (int i = 0; i < n; ++i) {
    double dz = z[i] - c;
    double e = std::exp(-dz * dz / (2.0 * w * w));
    r[i] = y[i] - (a * e + b);
    jac(i, 0) = e;
    jac(i, 1) = a * e * dz / (w * w);
    jac(i, 2) = a * e * dz * dz / (w * w * w);
    jac(i, 3) = 1.0;
  }
}

void fill_uncertainties(const Eigen::MatrixXd& jac, const Eigen::VectorXd& r, GaussianFit& fit) {
  const int n = static_cast<int>(r.size());
  const int dof = std::max(1, n - 4);
  double s2 = r.squaredNorm() / dof;
  Eigen::Matrix4d jtj = jac.transpose() * jac;
  Eigen::Matrix4d cov = jtj.ldlt().solve(Eigen::Matrix4d::Identity()) * s2;
  fit.sigma_amplitude = std::sqrt(std::max(0.0, cov(0, 0)));
  fit.sigma_center = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.sigma_width = std::sqrt(std::max(0.0, cov(2, 2)));
  fit.sigma_offset = std::sqrt(std::max(0.0, cov(3, 3)));
}

}  // namespace

GaussianFit fit_gaussian(std::span<const double> z, std::span<const double> counts) {
  const int n = static_cast<int>(z.size());
  if (n < 5 || counts.size() != z.size()) {
    throw std::invalid_argument("gaussian fit needs at least 5 (z, count) points");
  }

  auto [y_min_it, y_max_it] = std::minmax_element(counts.begin(), counts.end());
  auto [z_min_it, z_max_it] = std::minmax_element(z.begin(), z.end());
  const double y_min = *y_min_it, y_max = *y_max_it;
  const double z_range = *z_max_it - *z_min_it;

  GaussianFit fit;
  if (y_max - y_min <= 1e-12 * std::max(1.0, std::abs(y_max))) {
    // Flat within machine noise: no peak to fit.
    double mean = 0.0;
    for (double v : counts) mean += v;
    fit.offset = mean / n;
    fit.width = z_range > 0.0 ? z_range / 6.0 : 1.0;
    fit.center = 0.5 * (*z_min_it + *z_max_it);
    fit.converged = true;
    fit.degenerate = true;
    return fit;
  }

  // Moment-seeded initial guess.
  int peak_idx = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  double w0 = 0.0, wsum = 0.0;
  for (int i = 0; i < n; ++i) {
    double excess = counts[i] - y_min;
    w0 += excess * (z[i] - z[peak_idx]) * (z[i] - z[peak_idx]);
    wsum += excess;
  }
  const double min_width = std::max(1e-12, z_range / (8.0 * n));
  Eigen::Vector4d p(y_max - y_min, z[peak_idx],
                    std::max(std::sqrt(w0 / wsum), z_range > 0 ? z_range / 20.0 : 1.0), y_min);

  Eigen::VectorXd r(n);
  Eigen::MatrixXd jac(n, 4);
  residuals_and_jacobian(z, counts, p, r, jac);
  double cost = r.squaredNorm();
  double lambda = 1e-3;

  for (int iter = 1; iter <= 200; ++iter) {
    Eigen::Matrix4d jtj = jac.transpose() * jac;
    Eigen::Vector4d jtr = jac.transpose() * r;
    Eigen::Matrix4d damped = jtj;
    for (int k = 0; k < 4; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
    Eigen::Vector4d step = damped.ldlt().solve(jtr);

    Eigen::Vector4d trial = p + step;
    trial[2] = std::max(std::abs(trial[2]), min_width);
    Eigen::VectorXd r_trial(n);
    Eigen::MatrixXd jac_trial(n, 4);
    residuals_and_jacobian(z, counts, trial, r_trial, jac_trial);
    double cost_trial = r_trial.squaredNorm();

    if (cost_trial < cost) {
      double rel_step = step.norm() / std::max(p.norm(), 1e-30);
      double rel_drop = (cost - cost_trial) / std::max(cost, 1e-300);
      p = trial;
      r.swap(r_trial);
      jac.swap(jac_trial);
      cost = cost_trial;
      lambda = std::max(lambda * 0.3, 1e-12);
      fit.iterations = iter;
      if (rel_step < 1e-8 || rel_drop < 1e-12) {
        fit.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      fit.iterations = iter;
      if (lambda > 1e10) {
        // Even near-gradient-descent steps cannot reduce the cost: we are
        // at a numerical minimum.
        fit.converged = true;
        break;
      }
    }
  }

  if (!fit.converged) {
    throw ConvergenceError("gaussian fit did not converge in 200 iterations");
  }

  fit.amplitude = p[0];
  fit.center = p[1];
  fit.width = std::abs(p[2]);
  fit.offset = p[3];
  fit.residual_norm = std::sqrt(cost);
  fill_uncertainties(jac, r, fit);
  return fit;
}

GaussianFit fit_amplitude_at(std::span<const double> z, std::span<const double> counts,
                             double center, double width) {
  const int n = static_cast<int>(z.size());
  if (n < 3 || counts.size() != z.size()) {
    throw std::invalid_argument("amplitude fit needs at least 3 points");
  }
  if (width <= 0.0) throw std::invalid_argument("width must be positive");

  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    double dz = z[i] - center;
    design(i, 0) = std::exp(-dz * dz / (2.0 * width * width));
    design(i, 1) = 1.0;
    y[i] = counts[i];
  }
  Eigen::Vector2d sol = (design.transpose() * design)
                            .ldlt()
                            .solve(design.transpose() * y);
  Eigen::VectorXd r = y - design * sol;
  double s2 = r.squaredNorm() / std::max(1, n - 2);
  Eigen::Matrix2d cov =
      (design.transpose() * design).ldlt().solve(Eigen::Matrix2d::Identity()) * s2;

  GaussianFit fit;
  fit.amplitude = sol[0];
  fit.offset = sol[1];
  fit.center = center;
  fit.width = width;
  fit.sigma_amplitude = std::sqrt(std::max(0.0, cov(0, 0)));
  fit.sigma_offset = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.residual_norm = r.norm();
  fit.converged = true;
  return fit;
}

}  // namespace qiopa
