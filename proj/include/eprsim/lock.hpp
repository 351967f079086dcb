#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "eprsim/rng.hpp"

namespace eprsim {

/// Time-multiplexed phase-locking scheme: each cycle spends `control_s`
/// tracking the phase with probe light on, then `measure_s` acquiring data
/// with the correction frozen at its last value.
struct LockConfig {
  double cycle_s = 400e-6;
  double control_s = 360e-6;
  double measure_s = 40e-6;
  int n_loops = 7;                                  // metadata
  std::vector<double> probe_detunings_hz = {0.8e6, 0.5e6};  // metadata
  double drift_rad2_per_s = 0.0;  // phase diffusion coefficient
  double servo_bandwidth_hz = 1e4;

  void validate() const {
    if (!(cycle_s > 0.0 && control_s > 0.0 && measure_s > 0.0))
      throw std::invalid_argument("LockConfig: durations must be positive");
    if (std::abs(control_s + measure_s - cycle_s) > 1e-12 * cycle_s)
      throw std::invalid_argument("LockConfig: control + measure must equal cycle");
    if (!(drift_rad2_per_s >= 0.0))
      throw std::invalid_argument("LockConfig: drift must be >= 0");
    if (!(servo_bandwidth_hz > 0.0))
      throw std::invalid_argument("LockConfig: servo bandwidth must be positive");
  }
};

struct ResidualPhaseResult {
  double pooled_rms_rad = 0.0;
  std::vector<double> per_window_rms_rad;   // one entry per measurement window
  std::vector<double> time_s;               // samples inside measurement windows
  std::vector<double> residual_rad;
};

/// Simulates the residual phase error seen during measurement windows.
/// The optical phase performs a random walk with diffusion coefficient D;
/// during control windows a first-order servo tracks it, during measurement
/// windows the correction is frozen. Noise increments are drawn from a
/// per-cycle substream, so the result is a pure function of (config, seed).
inline ResidualPhaseResult simulate_residual_phase(const LockConfig& config,
                                                   int n_cycles, std::uint64_t seed,
                                                   int steps_per_cycle = 4096) {
  config.validate();
  if (n_cycles < 1)
    throw std::invalid_argument("simulate_residual_phase: n_cycles must be >= 1");
  if (steps_per_cycle < 16)
    throw std::invalid_argument("simulate_residual_phase: too few steps per cycle");

  const double dt = config.cycle_s / steps_per_cycle;
  const double sigma_step = std::sqrt(config.drift_rad2_per_s * dt);
  // first-order tracking loop, exact discrete update
  const double alpha = 1.0 - std::exp(-2.0 * std::numbers::pi *
                                      config.servo_bandwidth_hz * dt);

  ResidualPhaseResult out;
  out.per_window_rms_rad.reserve(n_cycles);

  double phase = 0.0;
  double correction = 0.0;
  for (int cycle = 0; cycle < n_cycles; ++cycle) {
    Xoshiro256pp rng = substream(seed, static_cast<std::uint64_t>(cycle));
    double window_sq_sum = 0.0;
    int window_count = 0;
    for (int step = 0; step < steps_per_cycle; ++step) {
      const double t = (cycle * static_cast<double>(steps_per_cycle) + step) * dt;
      phase += sigma_step * rng.normal();
      const bool in_control = step * dt < config.control_s;
      if (in_control) {
        correction += alpha * (phase - correction);
      } else {
        const double residual = phase - correction;
        window_sq_sum += residual * residual;
        ++window_count;
        out.time_s.push_back(t);
        out.residual_rad.push_back(residual);
      }
    }
    out.per_window_rms_rad.push_back(
        window_count > 0 ? std::sqrt(window_sq_sum / window_count) : 0.0);
  }

  double total_sq = 0.0;
  for (double r : out.residual_rad) total_sq += r * r;
  out.pooled_rms_rad =
      out.residual_rad.empty() ? 0.0 : std::sqrt(total_sq / out.residual_rad.size());
  return out;
}

enum class PhaseAveraging { ExactGaussian, SecondOrder };

/// Variance measured at the target quadrature when the analysis phase
/// carries a residual Gaussian error of width phi_rms: the orthogonal
/// quadrature mixes in as V_t cos^2(phi) + V_o sin^2(phi), averaged over the
/// phase distribution. The result always lies between the two variances.
inline double degrade_with_phase(double v_target, double v_ortho, double phi_rms,
                                 PhaseAveraging method = PhaseAveraging::ExactGaussian) {
  if (!(phi_rms >= 0.0))
    throw std::invalid_argument("degrade_with_phase: phi_rms must be >= 0");
  double mean_cos2;
  if (method == PhaseAveraging::ExactGaussian) {
    // E[cos^2 phi] = (1 + e^{-2 sigma^2}) / 2 for phi ~ N(0, sigma^2)
    mean_cos2 = 0.5 * (1.0 + std::exp(-2.0 * phi_rms * phi_rms));
  } else {
    mean_cos2 = 1.0 - phi_rms * phi_rms;
    if (mean_cos2 < 0.5) mean_cos2 = 0.5;  // keep the expansion sane for large phi
  }
  return v_target * mean_cos2 + v_ortho * (1.0 - mean_cos2);
}

}  // namespace eprsim
