#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eprsim/filters.hpp"
#include "eprsim/gaussian.hpp"
#include "eprsim/lock.hpp"

namespace eprsim {

/// One pin of the circuit-noise table: clearance of the shot-noise level
/// over the electronic floor, valid up to f_hz. The floor is flat (in shot
/// units) below the first pin, interpolated in dB between pins, and absent
/// above the last pin (the table covers the characterized band).
struct NoisePin {
  double f_hz = 0.0;
  double clearance_db = 0.0;
};

enum class QuadConfig { X, P };

inline const char* to_string(QuadConfig q) { return q == QuadConfig::X ? "x" : "p"; }

/// Full parameter set of one experiment run. Efficiencies are linear,
/// gain is in dB ("0 dB" = no amplification).
struct ExperimentParams {
  double r0 = 0.0;             // peak squeezing parameter of each source
  double opa_fwhm_hz = 6e12;   // squeezing-bandwidth FWHM of r(f)
  double eta_state = 1.0;
  double eta_opa = 1.0;
  double eta_hd = 1.0;
  double eta_extra = 1.0;      // unattributed detection efficiency, folded into eta_hd
  double gain_db = 0.0;
  double phase_rms_rad = 0.0;  // residual phase noise, applied before the PSA
  TransferChain chain;
  std::vector<NoisePin> electronic_noise;

  double gain_linear() const { return std::pow(10.0, gain_db / 10.0); }
  double eta_hd_effective() const { return eta_hd * eta_extra; }

  void validate() const {
    auto check01 = [](double v, const char* name) {
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument(std::string("ExperimentParams: ") + name +
                                    " must be in [0, 1]");
    };
    check01(eta_state, "eta_state");
    check01(eta_opa, "eta_opa");
    check01(eta_hd, "eta_hd");
    check01(eta_extra, "eta_extra");
    if (!(r0 >= 0.0)) throw std::invalid_argument("ExperimentParams: r0 must be >= 0");
    if (!(opa_fwhm_hz > 0.0))
      throw std::invalid_argument("ExperimentParams: opa_fwhm_hz must be positive");
    if (!(gain_db >= 0.0))
      throw std::invalid_argument("ExperimentParams: gain_db must be >= 0");
    if (!(phase_rms_rad >= 0.0))
      throw std::invalid_argument("ExperimentParams: phase_rms_rad must be >= 0");
    chain.validate();
    double prev = 0.0;
    for (const auto& pin : electronic_noise) {
      if (!(pin.f_hz > prev))
        throw std::invalid_argument("ExperimentParams: noise pins must have increasing f");
      prev = pin.f_hz;
    }
  }
};

/// Squeezing parameter roll-off of the source OPA: gaussian profile in r(f)
/// with the given FWHM.
inline double squeezing_parameter_at(double r0, double opa_fwhm_hz, double f) {
  const double sigma = 0.5 * opa_fwhm_hz / std::sqrt(2.0 * std::log(2.0));
  const double u = f / sigma;
  return r0 * std::exp(-0.5 * u * u);
}

/// Squeezed / antisqueezed variances (in shot units) at frequency f.
inline std::pair<double, double> squeezing_spectrum(double r0, double opa_fwhm_hz,
                                                    double f) {
  if (f < 0.0) throw std::invalid_argument("squeezing_spectrum: f must be >= 0");
  const double r = squeezing_parameter_at(r0, opa_fwhm_hz, f);
  return {std::exp(-2.0 * r), std::exp(2.0 * r)};
}

/// Electronic-noise floor at f, as a PSD relative to the flat (unfiltered)
/// shot-noise PSD. Zero if no table is configured or f is past the last pin.
inline double electronic_floor(const std::vector<NoisePin>& pins, double f) {
  if (pins.empty()) return 0.0;
  double clearance;
  if (f <= pins.front().f_hz) {
    clearance = pins.front().clearance_db;
  } else if (f > pins.back().f_hz) {
    return 0.0;
  } else {
    clearance = pins.back().clearance_db;
    for (std::size_t i = 1; i < pins.size(); ++i) {
      if (f <= pins[i].f_hz) {
        const double w = (f - pins[i - 1].f_hz) / (pins[i].f_hz - pins[i - 1].f_hz);
        clearance = pins[i - 1].clearance_db +
                    w * (pins[i].clearance_db - pins[i - 1].clearance_db);
        break;
      }
    }
  }
  return std::pow(10.0, -clearance / 10.0);
}

/// PSD of the two measured quadrature channels at one frequency, in units of
/// the flat shot-noise PSD (unfiltered vacuum == 1). `signal` is the 2x2
/// channel matrix, `shot` the per-channel shot-reference PSD through the
/// identical chain (PSA pump on).
struct PsdPoint {
  Eigen::Matrix2d signal;
  double shot = 0.0;
};

/// Builds the measured PSD matrix at frequency f. Per frequency the chain is
/// the same symplectic ladder as the covariance engine applies: squeezed /
/// antisqueezed inputs e^{-+2r(f)}, preparation loss, residual-phase mixing,
/// PSA (loss then gain), detection loss, then the detection filter and the
/// additive electronic floor. In the x config the channels are correlated
/// (x- squeezed); in the p config anti-correlated (p+ squeezed).
inline PsdPoint epr_psd(const ExperimentParams& params, QuadConfig config, double f) {
  if (f < 0.0) throw std::invalid_argument("epr_psd: f must be >= 0");
  auto [v_minus, v_plus] = squeezing_spectrum(params.r0, params.opa_fwhm_hz, f);

  auto loss = [](double v, double eta) { return eta * v + (1.0 - eta); };
  v_minus = loss(v_minus, params.eta_state);
  v_plus = loss(v_plus, params.eta_state);

  if (params.phase_rms_rad > 0.0) {
    const double vm = degrade_with_phase(v_minus, v_plus, params.phase_rms_rad);
    const double vp = degrade_with_phase(v_plus, v_minus, params.phase_rms_rad);
    v_minus = vm;
    v_plus = vp;
  }

  const double g = params.gain_linear();
  auto amplify = [&](double v) { return g * loss(v, params.eta_opa); };
  v_minus = loss(amplify(v_minus), params.eta_hd_effective());
  v_plus = loss(amplify(v_plus), params.eta_hd_effective());
  const double shot_chain = loss(amplify(1.0), params.eta_hd_effective());

  const double h2 = chain_power_response(params.chain, f);
  // clearance is quoted against the detected shot level in its passband, so
  // the flat floor scales with the chain shot, not with vacuum
  const double floor = shot_chain * electronic_floor(params.electronic_noise, f);

  const double diag = 0.5 * (v_minus + v_plus) * h2 + floor;
  double off = 0.5 * (v_plus - v_minus) * h2;
  if (config == QuadConfig::P) off = -off;  // p channels anti-correlated

  PsdPoint out;
  out.signal << diag, off, off, diag;
  out.shot = shot_chain * h2 + floor;
  return out;
}

/// Solves for the source squeezing parameter that puts the zero-frequency
/// squeezed-combo level at `target_db` (relative to shot) for a given total
/// efficiency: 10^(db/10) = eta_total e^{-2 r0} + 1 - eta_total.
inline double r0_for_zero_freq_db(double target_db, double eta_total) {
  if (!(eta_total > 0.0 && eta_total <= 1.0))
    throw std::invalid_argument("r0_for_zero_freq_db: eta_total must be in (0, 1]");
  const double v = std::pow(10.0, target_db / 10.0);
  const double e2r = (v - (1.0 - eta_total)) / eta_total;
  if (!(e2r > 0.0))
    throw std::invalid_argument("r0_for_zero_freq_db: target level below the loss floor");
  return -0.5 * std::log(e2r);
}

}  // namespace eprsim
