#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace eprsim {

/// One gain-sweep observation: PSA gain (linear) and the measured squeezed
/// combo level in dB relative to shot.
struct GainObservation {
  double gain_linear = 1.0;
  double level_db = 0.0;
};

struct FitResult {
  double eta_pre = 0.0;   // efficiency upstream of the measurement OPA
  double eta_post = 0.0;  // efficiency downstream, suppressed by the gain
  double r0 = 0.0;
  double rms_residual_db = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Model behind the fit: eta(G) = eta_pre*eta_post / (eta_post + (1-eta_post)/G),
/// measured level = 10 log10(eta(G) e^{-2 r0} + 1 - eta(G)).
inline double gain_sweep_model_db(double gain, double eta_pre, double eta_post,
                                  double r0) {
  const double eta = eta_pre * eta_post / (eta_post + (1.0 - eta_post) / gain);
  const double v = eta * std::exp(-2.0 * r0) + 1.0 - eta;
  return 10.0 * std::log10(v);
}

namespace detail {

struct FitProblem {
  const std::vector<GainObservation>& obs;
  bool fit_r0;

  int n_params() const { return fit_r0 ? 3 : 2; }

  double cost(const Eigen::VectorXd& p) const {
    double acc = 0.0;
    for (const auto& o : obs) {
      const double r = gain_sweep_model_db(o.gain_linear, p(0), p(1), p(2)) - o.level_db;
      acc += r * r;
    }
    return acc;
  }

  void residuals_jacobian(const Eigen::VectorXd& p, Eigen::VectorXd& r,
                          Eigen::MatrixXd& jac) const {
    const int m = static_cast<int>(obs.size());
    const int np = n_params();
    r.resize(m);
    jac.resize(m, np);
    const double a = p(0), b = p(1), r0 = p(2);
    const double e = std::exp(-2.0 * r0);
    const double db_per_ln = 10.0 / std::log(10.0);
    for (int i = 0; i < m; ++i) {
      const double g = obs[i].gain_linear;
      const double denom = b + (1.0 - b) / g;
      const double eta = a * b / denom;
      const double v = eta * e + 1.0 - eta;
      r(i) = 10.0 * std::log10(v) - obs[i].level_db;
      const double dv_deta = e - 1.0;
      const double deta_da = b / denom;
      const double deta_db = a / (g * denom * denom);
      jac(i, 0) = db_per_ln / v * dv_deta * deta_da;
      jac(i, 1) = db_per_ln / v * dv_deta * deta_db;
      if (fit_r0) jac(i, 2) = db_per_ln / v * eta * (-2.0 * e);
    }
  }
};

inline void clamp_params(Eigen::VectorXd& p, bool fit_r0) {
  p(0) = std::clamp(p(0), 1e-6, 1.0);
  p(1) = std::clamp(p(1), 1e-6, 1.0);
  if (fit_r0) p(2) = std::clamp(p(2), 0.0, 5.0);
}

}  // namespace detail

/// Least-squares fit of (eta_pre, eta_post) — and optionally r0 — to a gain
/// sweep. Damped Gauss-Newton from an 11x11 grid of starting points; box
/// constrained to [0, 1]^2. If no start converges the best point found is
/// still returned, with converged = false.
inline FitResult fit_efficiencies(const std::vector<GainObservation>& observations,
                                  std::optional<double> fixed_r0,
                                  int max_iterations = 200, double tol = 1e-10) {
  const bool fit_r0 = !fixed_r0.has_value();
  std::vector<double> gains;
  for (const auto& o : observations) {
    if (!(o.gain_linear >= 1.0))
      throw std::invalid_argument("fit_efficiencies: gains must be >= 1 (linear)");
    gains.push_back(o.gain_linear);
  }
  std::sort(gains.begin(), gains.end());
  gains.erase(std::unique(gains.begin(), gains.end()), gains.end());
  const std::size_t needed = fit_r0 ? 3 : 2;
  if (gains.size() < needed)
    throw std::invalid_argument(
        "fit_efficiencies: rank deficient — need observations at " +
        std::to_string(needed) + " distinct gains");

  detail::FitProblem problem{observations, fit_r0};

  FitResult best;
  double best_cost = std::numeric_limits<double>::infinity();

  std::vector<double> r0_starts =
      fit_r0 ? std::vector<double>{0.25, 0.75, 1.25, 2.0} : std::vector<double>{*fixed_r0};

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  for (int ia = 0; ia < 11; ++ia) {
    for (int ib = 0; ib < 11; ++ib) {
      for (double r0s : r0_starts) {
        Eigen::VectorXd p(3);
        p << 0.05 + 0.09 * ia, 0.05 + 0.09 * ib, r0s;
        double cost = problem.cost(p);
        double lambda = 1e-3;
        bool converged = false;
        int iter = 0;
        for (; iter < max_iterations; ++iter) {
          problem.residuals_jacobian(p, r, jac);
          const Eigen::MatrixXd jtj = jac.transpose() * jac;
          const Eigen::VectorXd jtr = jac.transpose() * r;
          bool improved = false;
          for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::MatrixXd damped = jtj;
            for (int d = 0; d < damped.rows(); ++d)
              damped(d, d) += lambda * std::max(jtj(d, d), 1e-12);
            const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
            Eigen::VectorXd trial3 = p;
            trial3.head(problem.n_params()) += step;
            detail::clamp_params(trial3, fit_r0);
            const double trial_cost = problem.cost(trial3);
            if (trial_cost < cost) {
              const double rel_change = (cost - trial_cost) / std::max(cost, 1e-300);
              p = trial3;
              cost = trial_cost;
              lambda = std::max(lambda / 3.0, 1e-12);
              improved = true;
              if (rel_change < tol || cost < 1e-24) converged = true;
              break;
            }
            lambda *= 10.0;
          }
          if (!improved) {
            converged = true;  // stationary within the damping ladder
            break;
          }
          if (converged) break;
        }
        if (cost < best_cost) {
          best_cost = cost;
          best.eta_pre = p(0);
          best.eta_post = p(1);
          best.r0 = fit_r0 ? p(2) : *fixed_r0;
          best.converged = converged;
          best.iterations = iter;
        }
      }
    }
  }

  best.rms_residual_db = std::sqrt(best_cost / static_cast<double>(observations.size()));
  return best;
}

}  // namespace eprsim
