#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "eprsim/config.hpp"
#include "eprsim/pipeline.hpp"
#include "eprsim/predict.hpp"

namespace eprsim {

inline nlohmann::ordered_json combo_prediction_to_json(const ComboPrediction& c) {
  nlohmann::ordered_json j;
  j["x_plus_db"] = c.x_plus_db;
  j["x_minus_db"] = c.x_minus_db;
  j["p_plus_db"] = c.p_plus_db;
  j["p_minus_db"] = c.p_minus_db;
  j["duan"] = c.duan;
  return j;
}

inline nlohmann::ordered_json prediction_to_json(const PredictionReport& rep) {
  nlohmann::ordered_json j;
  j["gain_linear"] = rep.gain_linear;
  j["eta_meas"] = rep.eta_meas;
  j["eta_total"] = rep.eta_total;
  j["r0"] = rep.r0;
  j["zero_freq"] = combo_prediction_to_json(rep.zero_freq);
  j["pointwise"] = combo_prediction_to_json(rep.pointwise);
  j["band_limited"] = combo_prediction_to_json(rep.band_limited);
  j["wavepacket"] = combo_prediction_to_json(rep.wavepacket);
  return j;
}

inline nlohmann::ordered_json mode_to_json(const ModeFunction& mode) {
  nlohmann::ordered_json j;
  j["shape"] = to_string(mode.shape);
  j["gamma"] = mode.gamma;
  j["period_s"] = mode.period_s;
  j["taps"] = mode.taps();
  j["samples"] = mode.samples;
  return j;
}

inline nlohmann::ordered_json analysis_report_to_json(const AnalysisReport& rep) {
  nlohmann::ordered_json j;
  j["noise_power_db"] = rep.noise_power_db;
  j["band_limited_db"] = rep.band_limited_db;
  j["band_limit_hz"] = rep.band_limit_hz;
  j["wavepacket_db"] = rep.wavepacket_db;
  j["correlation_width_s"] = rep.correlation_width_s;
  j["duan"] = rep.duan;
  j["mode"] = mode_to_json(rep.mode);
  j["phase_rms_rad"] = rep.phase_rms_rad;
  if (rep.fit) {
    nlohmann::ordered_json f;
    f["eta_pre"] = rep.fit->eta_pre;
    f["eta_post"] = rep.fit->eta_post;
    f["r0"] = rep.fit->r0;
    f["rms_residual_db"] = rep.fit->rms_residual_db;
    f["converged"] = rep.fit->converged;
    j["fit"] = f;
  }
  return j;
}

inline nlohmann::ordered_json fit_result_to_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["eta_pre"] = fit.eta_pre;
  j["eta_post"] = fit.eta_post;
  j["r0"] = fit.r0;
  j["rms_residual_db"] = fit.rms_residual_db;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  return j;
}

/// Auto-correlation curves as CSV: lag_s, then one column per curve in the
/// report (x_plus, x_minus, p_plus, p_minus, shot).
inline void export_autocorr_csv(const AnalysisReport& rep, const std::string& path) {
  static const char* order[] = {"x_plus", "x_minus", "p_plus", "p_minus", "shot"};
  std::ofstream out(path);
  if (!out) throw IoError("export_autocorr_csv: cannot open " + path);
  out << "lag_s";
  for (const char* name : order)
    if (rep.autocorr.count(name)) out << ',' << name;
  out << "\n";
  const auto& ref = rep.autocorr.begin()->second;
  char buf[64];
  for (std::size_t i = 0; i < ref.lag_s.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9e", ref.lag_s[i]);
    out << buf;
    for (const char* name : order) {
      auto it = rep.autocorr.find(name);
      if (it == rep.autocorr.end()) continue;
      std::snprintf(buf, sizeof(buf), "%.12g", it->second.value[i]);
      out << ',' << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("export_autocorr_csv: short write to " + path);
}

/// Per-window wavepacket samples as CSV: window_index then one column per combo.
inline void export_window_samples_csv(const FrameSet& x_signal, const FrameSet& p_signal,
                                      const ModeFunction& mode, const std::string& path) {
  const auto xp = wavepacket_quadrature(x_signal, make_combo(Combo::XPlus), mode);
  const auto xm = wavepacket_quadrature(x_signal, make_combo(Combo::XMinus), mode);
  const auto pp = wavepacket_quadrature(p_signal, make_combo(Combo::PPlus), mode);
  const auto pm = wavepacket_quadrature(p_signal, make_combo(Combo::PMinus), mode);
  std::ofstream out(path);
  if (!out) throw IoError("export_window_samples_csv: cannot open " + path);
  out << "window_index,x_plus,x_minus,p_plus,p_minus\n";
  const std::size_t n = std::min(std::min(xp.size(), xm.size()),
                                 std::min(pp.size(), pm.size()));
  char buf[64];
  for (std::size_t i = 0; i < n; ++i) {
    out << i;
    for (const auto* col : {&xp, &xm, &pp, &pm}) {
      std::snprintf(buf, sizeof(buf), "%.12g", (*col)[i]);
      out << ',' << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("export_window_samples_csv: short write to " + path);
}

}  // namespace eprsim
