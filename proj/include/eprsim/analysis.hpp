#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "eprsim/errors.hpp"
#include "eprsim/fft.hpp"
#include "eprsim/frames.hpp"
#include "eprsim/parallel.hpp"

namespace eprsim {

enum class Combo { XPlus, XMinus, PPlus, PMinus };

inline const char* to_string(Combo c) {
  switch (c) {
    case Combo::XPlus: return "x_plus";
    case Combo::XMinus: return "x_minus";
    case Combo::PPlus: return "p_plus";
    case Combo::PMinus: return "p_minus";
  }
  return "?";
}

inline QuadConfig quadrature_of(Combo c) {
  return (c == Combo::XPlus || c == Combo::XMinus) ? QuadConfig::X : QuadConfig::P;
}

/// Normalized linear combination of the two channels: c1*ch1 + c2*ch2 with
/// (c1, c2) = (1, +-1)/sqrt(2).
struct ComboSpec {
  Combo label = Combo::XMinus;
  double c1 = 0.0, c2 = 0.0;
};

inline ComboSpec make_combo(Combo label) {
  const double inv_sqrt2 = std::sqrt(0.5);
  const bool plus = label == Combo::XPlus || label == Combo::PPlus;
  return {label, inv_sqrt2, plus ? inv_sqrt2 : -inv_sqrt2};
}

namespace detail {

inline void check_signal_shot(const FrameSet& signal, const FrameSet& shot,
                              const ComboSpec& combo) {
  if (signal.kind != FrameKind::Signal)
    throw ModelError("analysis: first frame set must be a signal set");
  if (shot.kind != FrameKind::Shot)
    throw ModelError("analysis: reference frame set must be a shot set");
  if (signal.config != quadrature_of(combo.label))
    throw ModelError(std::string("analysis: combo ") + to_string(combo.label) +
                     " does not match the signal quadrature configuration");
  if (signal.fs_hz != shot.fs_hz)
    throw ModelError("analysis: signal and shot sampling rates differ");
  if (signal.n_points != shot.n_points || signal.n_channels != shot.n_channels)
    throw ModelError("analysis: signal and shot dimensions differ");
}

}  // namespace detail

/// Pooled second moment of the combo samples over all frames and points.
/// Traces are zero-mean by construction, so this is the combo variance.
inline double combo_mean_square(const FrameSet& frames, const ComboSpec& combo) {
  double total = 0.0;
  for (int frame = 0; frame < frames.n_frames; ++frame) {
    auto ch1 = frames.channel(frame, 0);
    auto ch2 = frames.channel(frame, 1);
    double acc = 0.0;
    for (int n = 0; n < frames.n_points; ++n) {
      const double s = combo.c1 * ch1[n] + combo.c2 * ch2[n];
      acc += s * s;
    }
    total += acc;
  }
  return total / (static_cast<double>(frames.n_frames) * frames.n_points);
}

/// Noise power of the combo relative to the shot reference, in dB.
inline double noise_power_db(const FrameSet& signal, const FrameSet& shot,
                             const ComboSpec& combo) {
  detail::check_signal_shot(signal, shot, combo);
  const double v_shot = combo_mean_square(shot, combo);
  if (!(v_shot > 1e-300))
    throw ModelError("noise_power_db: degenerate shot reference (zero variance)");
  return 10.0 * std::log10(combo_mean_square(signal, combo) / v_shot);
}

struct AcfCurve {
  std::vector<double> lag_s;
  std::vector<double> value;  // linear ratio to the shot tau=0 variance
};

/// Auto-correlation of the combo, biased estimator averaged within frames
/// and then over frames, normalized so a shot reference maps to 1 at tau=0.
inline AcfCurve autocorrelation(const FrameSet& frames, const ComboSpec& combo,
                                double shot_variance, int max_lag = 128) {
  if (!(shot_variance > 1e-300))
    throw ModelError("autocorrelation: degenerate shot reference");
  if (frames.n_points < 2 * max_lag)
    throw std::invalid_argument("autocorrelation: n_points must be >= 2*max_lag");

  const int n = frames.n_points;
  std::vector<double> acc(static_cast<std::size_t>(max_lag) + 1, 0.0);
  std::vector<std::vector<double>> partial(
      static_cast<std::size_t>(frames.n_frames));

  parallel_for(static_cast<std::size_t>(frames.n_frames), [&](std::size_t frame) {
    auto ch1 = frames.channel(static_cast<int>(frame), 0);
    auto ch2 = frames.channel(static_cast<int>(frame), 1);
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s[i] = combo.c1 * ch1[i] + combo.c2 * ch2[i];
    std::vector<double> local(static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (int lag = 0; lag <= max_lag; ++lag) {
      double dot = 0.0;
      for (int i = 0; i + lag < n; ++i) dot += s[i] * s[i + lag];
      local[lag] = dot / n;  // biased estimator
    }
    partial[frame] = std::move(local);
  });

  for (const auto& local : partial)
    for (int lag = 0; lag <= max_lag; ++lag) acc[lag] += local[lag];

  AcfCurve curve;
  curve.lag_s.resize(acc.size());
  curve.value.resize(acc.size());
  for (int lag = 0; lag <= max_lag; ++lag) {
    curve.lag_s[lag] = lag / frames.fs_hz;
    curve.value[lag] = acc[lag] / frames.n_frames / shot_variance;
  }
  return curve;
}

/// Full width at half of |I(0) - baseline|; the baseline is the mean over
/// the last quarter of the lag grid. The curve is taken as symmetric in tau.
inline double correlation_width(const AcfCurve& curve) {
  const std::size_t n = curve.value.size();
  if (n < 8) throw std::invalid_argument("correlation_width: curve too short");
  double baseline = 0.0;
  const std::size_t tail_begin = n - n / 4;
  for (std::size_t i = tail_begin; i < n; ++i) baseline += curve.value[i];
  baseline /= static_cast<double>(n - tail_begin);

  const double peak = std::abs(curve.value[0] - baseline);
  if (!(peak > 0.0))
    throw ModelError("correlation_width: degenerate curve (no peak above baseline)");
  const double half = 0.5 * peak;

  for (std::size_t i = 1; i < tail_begin; ++i) {
    const double prev = std::abs(curve.value[i - 1] - baseline);
    const double cur = std::abs(curve.value[i] - baseline);
    if (cur <= half) {
      const double frac = (prev - half) / (prev - cur);
      const double tau_half =
          curve.lag_s[i - 1] + frac * (curve.lag_s[i] - curve.lag_s[i - 1]);
      return 2.0 * tau_half;
    }
  }
  throw ModelError("correlation_width: no half-maximum crossing in the lag range");
}

enum class ModeShape { PolynomialGaussian, RaisedCosine, CustomTable };

inline const char* to_string(ModeShape s) {
  switch (s) {
    case ModeShape::PolynomialGaussian: return "polynomial-gaussian";
    case ModeShape::RaisedCosine: return "raised-cosine";
    case ModeShape::CustomTable: return "custom-table";
  }
  return "?";
}

/// Temporal wavepacket mode: unit-L2-norm samples on the trace grid, with
/// window period T (one mode per non-overlapping T window).
struct ModeFunction {
  ModeShape shape = ModeShape::PolynomialGaussian;
  double gamma = 0.0;     // 1/s width parameter (shape-dependent meaning)
  double period_s = 40e-12;
  std::vector<double> samples;

  int taps() const { return static_cast<int>(samples.size()); }
};

/// Samples the requested mode shape on the grid and normalizes it. The
/// default shape is f(t) ~ t * exp(-(gamma t)^2) centered in the window.
inline ModeFunction make_mode(ModeShape shape, double gamma, double period_s,
                              double fs_hz, const std::vector<double>& table = {}) {
  if (!(period_s > 0.0) || !(fs_hz > 0.0))
    throw std::invalid_argument("make_mode: period and fs must be positive");
  // samples per window; tolerate representation error in period*fs
  const int taps = static_cast<int>(period_s * fs_hz + 1e-9);
  if (taps < 1) throw std::invalid_argument("make_mode: fs*period must be >= 1");

  ModeFunction mode;
  mode.shape = shape;
  mode.gamma = gamma;
  mode.period_s = period_s;

  if (shape == ModeShape::CustomTable) {
    if (table.empty() || static_cast<int>(table.size()) > taps)
      throw std::invalid_argument("make_mode: custom table must fit in the period");
    mode.samples = table;
  } else {
    if (!(gamma > 0.0)) throw std::invalid_argument("make_mode: gamma must be positive");
    mode.samples.resize(static_cast<std::size_t>(taps));
    for (int j = 0; j < taps; ++j) {
      const double t = (j - 0.5 * (taps - 1)) / fs_hz;
      if (shape == ModeShape::PolynomialGaussian) {
        const double u = gamma * t;
        mode.samples[j] = t * std::exp(-u * u);
      } else {  // raised cosine over the window
        mode.samples[j] = 1.0 - std::cos(2.0 * std::numbers::pi *
                                         (j + 0.5) / static_cast<double>(taps));
      }
    }
  }

  double norm_sq = 0.0;
  for (double v : mode.samples) norm_sq += v * v;
  if (!(norm_sq > 0.0)) throw std::invalid_argument("make_mode: mode has zero norm");
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& v : mode.samples) v *= inv;
  return mode;
}

/// Inner products of the combo trace with the mode over consecutive
/// non-overlapping windows, concatenated across frames.
inline std::vector<double> wavepacket_quadrature(const FrameSet& frames,
                                                 const ComboSpec& combo,
                                                 const ModeFunction& mode) {
  const int taps = mode.taps();
  if (taps < 1 || taps > frames.n_points)
    throw std::invalid_argument("wavepacket_quadrature: mode does not fit in a frame");
  const int windows = frames.n_points / taps;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(windows) * frames.n_frames);
  for (int frame = 0; frame < frames.n_frames; ++frame) {
    auto ch1 = frames.channel(frame, 0);
    auto ch2 = frames.channel(frame, 1);
    for (int w = 0; w < windows; ++w) {
      const int base = w * taps;
      double acc = 0.0;
      for (int j = 0; j < taps; ++j)
        acc += mode.samples[j] * (combo.c1 * ch1[base + j] + combo.c2 * ch2[base + j]);
      out.push_back(acc);
    }
  }
  return out;
}

/// Wavepacket-mode noise power of the combo relative to shot, in dB.
inline double wavepacket_db(const FrameSet& signal, const FrameSet& shot,
                            const ComboSpec& combo, const ModeFunction& mode) {
  detail::check_signal_shot(signal, shot, combo);
  auto mean_square = [](const std::vector<double>& v) {
    double acc = 0.0;
    for (double s : v) acc += s * s;
    return acc / static_cast<double>(v.size());
  };
  const double v_shot = mean_square(wavepacket_quadrature(shot, combo, mode));
  if (!(v_shot > 1e-300))
    throw ModelError("wavepacket_db: degenerate shot reference");
  return 10.0 * std::log10(mean_square(wavepacket_quadrature(signal, combo, mode)) / v_shot);
}

/// Variance ratio signal/shot restricted to |f| <= band_hz, estimated from
/// periodograms. frame_stride > 1 subsamples frames to bound the FFT cost.
inline double band_limited_db(const FrameSet& signal, const FrameSet& shot,
                              const ComboSpec& combo, double band_hz,
                              int frame_stride = 1) {
  detail::check_signal_shot(signal, shot, combo);
  if (frame_stride < 1) throw std::invalid_argument("band_limited_db: bad stride");
  const int n = signal.n_points;
  const Fft fft(static_cast<std::size_t>(n));
  const int k_max = std::min(n / 2, static_cast<int>(band_hz / signal.fs_hz * n));

  auto band_power = [&](const FrameSet& frames) {
    std::vector<int> picks;
    for (int frame = 0; frame < frames.n_frames; frame += frame_stride)
      picks.push_back(frame);
    std::vector<double> partial(picks.size(), 0.0);
    parallel_for(picks.size(), [&](std::size_t idx) {
      const int frame = picks[idx];
      auto ch1 = frames.channel(frame, 0);
      auto ch2 = frames.channel(frame, 1);
      std::vector<std::complex<double>> buf(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        buf[i] = combo.c1 * ch1[i] + combo.c2 * ch2[i];
      fft.forward(buf.data());
      double acc = std::norm(buf[0]);
      for (int k = 1; k <= k_max; ++k)
        acc += std::norm(buf[k]) + std::norm(buf[n - k]);
      partial[idx] = acc / (static_cast<double>(n) * n);
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total / static_cast<double>(picks.size());
  };

  const double v_shot = band_power(shot);
  if (!(v_shot > 1e-300))
    throw ModelError("band_limited_db: degenerate shot reference");
  return 10.0 * std::log10(band_power(signal) / v_shot);
}

/// Duan inseparability value from measured traces:
/// Var(x-)/shot * 1/2 + Var(p+)/shot * 1/2. Entangled iff < 1.
inline double duan_from_traces(const FrameSet& x_signal, const FrameSet& x_shot,
                               const FrameSet& p_signal, const FrameSet& p_shot) {
  const double rx =
      std::pow(10.0, noise_power_db(x_signal, x_shot, make_combo(Combo::XMinus)) / 10.0);
  const double rp =
      std::pow(10.0, noise_power_db(p_signal, p_shot, make_combo(Combo::PPlus)) / 10.0);
  return 0.5 * rx + 0.5 * rp;
}

}  // namespace eprsim
