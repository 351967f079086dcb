#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "eprsim/analysis.hpp"
#include "eprsim/config.hpp"
#include "eprsim/fit.hpp"
#include "eprsim/frames.hpp"
#include "eprsim/lock.hpp"
#include "eprsim/predict.hpp"
#include "eprsim/synth.hpp"

namespace eprsim {

/// Roles salt the master seed so the three frame sets of one run draw from
/// independent substreams.
enum class RunRole : std::uint64_t { SignalX = 1, SignalP = 2, Shot = 3, LockSim = 4 };

inline std::uint64_t derive_seed(std::uint64_t master, RunRole role) {
  return substream_key(master ^ 0xA5C1E7F209B4D36EULL, static_cast<std::uint64_t>(role));
}

struct SimulatedRun {
  FrameSet x_signal;
  FrameSet p_signal;
  FrameSet shot;
  std::optional<ResidualPhaseResult> lock_residual;
  double phase_rms_rad = 0.0;
};

/// Effective parameters of a run: if a lock section is configured, the
/// residual-phase simulation runs first and its pooled RMS feeds the
/// pre-amplification phase mixing.
inline ExperimentParams effective_params(const RunConfig& cfg,
                                         std::optional<ResidualPhaseResult>* residual_out,
                                         std::uint64_t master_seed) {
  ExperimentParams params = cfg.params;
  if (cfg.lock) {
    const ResidualPhaseResult res = simulate_residual_phase(
        cfg.lock->lock, cfg.lock->n_cycles, derive_seed(master_seed, RunRole::LockSim));
    params.phase_rms_rad = std::hypot(params.phase_rms_rad, res.pooled_rms_rad);
    if (residual_out) *residual_out = res;
  }
  return params;
}

/// Synthesizes the three frame sets of one run (x signal, p signal, shot).
inline SimulatedRun simulate_run(const RunConfig& cfg,
                                 std::optional<std::uint64_t> seed_override = {}) {
  const std::uint64_t master = seed_override.value_or(cfg.acquisition.seed);
  SimulatedRun run;
  const ExperimentParams params = effective_params(cfg, &run.lock_residual, master);
  run.phase_rms_rad = params.phase_rms_rad;
  const auto& acq = cfg.acquisition;
  run.x_signal = synthesize_signal(params, QuadConfig::X, acq.fs_hz, acq.n_points,
                                   acq.n_frames, derive_seed(master, RunRole::SignalX));
  run.p_signal = synthesize_signal(params, QuadConfig::P, acq.fs_hz, acq.n_points,
                                   acq.n_frames, derive_seed(master, RunRole::SignalP));
  run.shot = shot_reference(params, acq.fs_hz, acq.n_points, acq.n_frames,
                            derive_seed(master, RunRole::Shot));
  return run;
}

/// Everything the analysis extracts from one run's traces.
struct AnalysisReport {
  std::map<std::string, double> noise_power_db;    // per combo, full band
  std::map<std::string, double> band_limited_db;   // per combo, <= band_limit_hz
  std::map<std::string, double> wavepacket_db;     // per combo
  std::map<std::string, AcfCurve> autocorr;        // per combo + "shot"
  std::map<std::string, double> correlation_width_s;  // squeezed combos
  double duan = 0.0;
  double shot_variance = 0.0;
  ModeFunction mode;
  double band_limit_hz = 0.0;
  double phase_rms_rad = 0.0;
  std::optional<FitResult> fit;

  void validate() const {
    auto check_map = [](const std::map<std::string, double>& m, const char* what) {
      for (const auto& [key, v] : m)
        if (!std::isfinite(v))
          throw ModelError(std::string("AnalysisReport: non-finite ") + what + " for " + key);
    };
    check_map(noise_power_db, "noise power");
    check_map(band_limited_db, "band-limited power");
    check_map(wavepacket_db, "wavepacket power");
    if (!(duan >= 0.0)) throw ModelError("AnalysisReport: duan must be >= 0");
  }
};

inline void check_run_consistency(const FrameSet& x_signal, const FrameSet& p_signal,
                                  const FrameSet& shot) {
  if (x_signal.config != QuadConfig::X || x_signal.kind != FrameKind::Signal)
    throw ModelError("analyze: first frame set must be an x-configured signal set");
  if (p_signal.config != QuadConfig::P || p_signal.kind != FrameKind::Signal)
    throw ModelError("analyze: second frame set must be a p-configured signal set");
  if (shot.kind != FrameKind::Shot)
    throw ModelError("analyze: third frame set must be a shot reference");
  if (x_signal.fs_hz != shot.fs_hz || p_signal.fs_hz != shot.fs_hz)
    throw ModelError("analyze: sampling rates of signal and shot sets differ");
  if (x_signal.n_points != shot.n_points || p_signal.n_points != shot.n_points)
    throw ModelError("analyze: point counts of signal and shot sets differ");
}

inline AnalysisReport analyze_run(const RunConfig& cfg, const FrameSet& x_signal,
                                  const FrameSet& p_signal, const FrameSet& shot) {
  check_run_consistency(x_signal, p_signal, shot);
  AnalysisReport rep;
  rep.mode = cfg.make_mode_function();
  rep.band_limit_hz = cfg.analysis.band_limit_hz;

  const auto combos = {Combo::XPlus, Combo::XMinus, Combo::PPlus, Combo::PMinus};
  for (Combo label : combos) {
    const ComboSpec combo = make_combo(label);
    const FrameSet& signal =
        quadrature_of(label) == QuadConfig::X ? x_signal : p_signal;
    rep.noise_power_db[to_string(label)] = noise_power_db(signal, shot, combo);
    rep.band_limited_db[to_string(label)] =
        band_limited_db(signal, shot, combo, cfg.analysis.band_limit_hz,
                        cfg.analysis.band_frame_stride);
    rep.wavepacket_db[to_string(label)] = wavepacket_db(signal, shot, combo, rep.mode);
    const double shot_var = combo_mean_square(shot, combo);
    rep.autocorr[to_string(label)] =
        autocorrelation(signal, combo, shot_var, cfg.analysis.max_lag);
  }
  {
    const ComboSpec ref = make_combo(Combo::XMinus);
    rep.shot_variance = combo_mean_square(shot, ref);
    rep.autocorr["shot"] =
        autocorrelation(shot, ref, rep.shot_variance, cfg.analysis.max_lag);
  }
  rep.correlation_width_s["x_minus"] = correlation_width(rep.autocorr["x_minus"]);
  rep.correlation_width_s["p_plus"] = correlation_width(rep.autocorr["p_plus"]);
  rep.duan = duan_from_traces(x_signal, shot, p_signal, shot);
  rep.validate();
  return rep;
}

}  // namespace eprsim
