#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eprsim/analysis.hpp"
#include "eprsim/errors.hpp"
#include "eprsim/lock.hpp"
#include "eprsim/spectral.hpp"

namespace eprsim {

struct AcquisitionConfig {
  double fs_hz = 256e9;
  int n_points = 5121;
  int n_frames = 5000;
  std::uint64_t seed = 1;
};

struct ModeConfig {
  ModeShape shape = ModeShape::PolynomialGaussian;
  double gamma = 7.2e10;
  double period_s = 40e-12;
  std::vector<double> table;
};

struct AnalysisConfig {
  int max_lag = 128;
  double band_limit_hz = 66e9;
  int band_frame_stride = 5;
};

struct LockSection {
  LockConfig lock;
  int n_cycles = 50;
};

/// One reproducible run: experiment parameters + acquisition + analysis
/// settings. Parsed strictly — unknown keys are rejected.
struct RunConfig {
  ExperimentParams params;
  AcquisitionConfig acquisition;
  ModeConfig mode;
  AnalysisConfig analysis;
  std::optional<LockSection> lock;
  std::optional<std::string> output_dir;
  // free-form hardware/context annotations, echoed into reports unvalidated
  nlohmann::ordered_json metadata;

  ModeFunction make_mode_function() const {
    return make_mode(mode.shape, mode.gamma, mode.period_s, acquisition.fs_hz,
                     mode.table);
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::set<std::string>& allowed,
                                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("config: unknown key \"" + it.key() + "\" in " + where);
}

template <typename T>
T get_or(const nlohmann::json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config: bad value for \"" + key + "\"");
  }
}

inline FilterKind filter_kind_from_string(const std::string& s) {
  if (s == "one-pole-lowpass") return FilterKind::OnePoleLowpass;
  if (s == "brickwall-lowpass") return FilterKind::BrickwallLowpass;
  if (s == "gaussian-lowpass") return FilterKind::GaussianLowpass;
  if (s == "one-pole-highpass") return FilterKind::OnePoleHighpass;
  throw ConfigError("config: unknown filter kind \"" + s + "\"");
}

inline const char* filter_kind_to_string(FilterKind k) {
  switch (k) {
    case FilterKind::OnePoleLowpass: return "one-pole-lowpass";
    case FilterKind::BrickwallLowpass: return "brickwall-lowpass";
    case FilterKind::GaussianLowpass: return "gaussian-lowpass";
    case FilterKind::OnePoleHighpass: return "one-pole-highpass";
  }
  return "?";
}

inline ModeShape mode_shape_from_string(const std::string& s) {
  if (s == "polynomial-gaussian") return ModeShape::PolynomialGaussian;
  if (s == "raised-cosine") return ModeShape::RaisedCosine;
  if (s == "custom-table") return ModeShape::CustomTable;
  throw ConfigError("config: unknown mode shape \"" + s + "\"");
}

}  // namespace detail

inline ExperimentParams parse_experiment_params(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: \"params\" must be an object");
  detail::reject_unknown_keys(
      j,
      {"r0", "opa_fwhm_hz", "eta_state", "eta_opa", "eta_hd", "eta_extra", "gain_db",
       "phase_rms_rad", "chain", "electronic_noise"},
      "params");
  ExperimentParams p;
  p.r0 = detail::get_or(j, "r0", 0.0);
  p.opa_fwhm_hz = detail::get_or(j, "opa_fwhm_hz", 6e12);
  p.eta_state = detail::get_or(j, "eta_state", 1.0);
  p.eta_opa = detail::get_or(j, "eta_opa", 1.0);
  p.eta_hd = detail::get_or(j, "eta_hd", 1.0);
  p.eta_extra = detail::get_or(j, "eta_extra", 1.0);
  p.gain_db = detail::get_or(j, "gain_db", 0.0);
  p.phase_rms_rad = detail::get_or(j, "phase_rms_rad", 0.0);
  if (j.contains("chain")) {
    if (!j.at("chain").is_array()) throw ConfigError("config: \"chain\" must be an array");
    for (const auto& st : j.at("chain")) {
      detail::reject_unknown_keys(st, {"kind", "cutoff_hz"}, "params.chain[]");
      FilterStage stage;
      stage.kind = detail::filter_kind_from_string(
          detail::get_or<std::string>(st, "kind", ""));
      stage.cutoff_hz = detail::get_or(st, "cutoff_hz", 0.0);
      p.chain.stages.push_back(stage);
    }
  } else {
    p.chain = default_detection_chain();
  }
  if (j.contains("electronic_noise")) {
    if (!j.at("electronic_noise").is_array())
      throw ConfigError("config: \"electronic_noise\" must be an array");
    for (const auto& pin : j.at("electronic_noise")) {
      detail::reject_unknown_keys(pin, {"f_hz", "clearance_db"},
                                  "params.electronic_noise[]");
      p.electronic_noise.push_back({detail::get_or(pin, "f_hz", 0.0),
                                    detail::get_or(pin, "clearance_db", 0.0)});
    }
  } else {
    // published clearances: 15 dB up to 20 GHz, 10 dB up to 60 GHz
    p.electronic_noise = {{20e9, 15.0}, {60e9, 10.0}};
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return p;
}

inline nlohmann::ordered_json experiment_params_to_json(const ExperimentParams& p) {
  nlohmann::ordered_json j;
  j["r0"] = p.r0;
  j["opa_fwhm_hz"] = p.opa_fwhm_hz;
  j["eta_state"] = p.eta_state;
  j["eta_opa"] = p.eta_opa;
  j["eta_hd"] = p.eta_hd;
  j["eta_extra"] = p.eta_extra;
  j["gain_db"] = p.gain_db;
  j["phase_rms_rad"] = p.phase_rms_rad;
  j["chain"] = nlohmann::ordered_json::array();
  for (const auto& st : p.chain.stages)
    j["chain"].push_back({{"kind", detail::filter_kind_to_string(st.kind)},
                          {"cutoff_hz", st.cutoff_hz}});
  j["electronic_noise"] = nlohmann::ordered_json::array();
  for (const auto& pin : p.electronic_noise)
    j["electronic_noise"].push_back(
        {{"f_hz", pin.f_hz}, {"clearance_db", pin.clearance_db}});
  return j;
}

inline RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  detail::reject_unknown_keys(j,
                              {"version", "params", "acquisition", "mode", "analysis",
                               "lock", "output", "metadata"},
                              "top level");
  if (!j.contains("version")) throw ConfigError("config: missing \"version\" field");
  if (!j.at("version").is_number_integer() || j.at("version").get<int>() != 1)
    throw ConfigError("config: unsupported version (expected 1)");

  RunConfig cfg;
  cfg.params = parse_experiment_params(j.value("params", nlohmann::json::object()));

  const auto acq = j.value("acquisition", nlohmann::json::object());
  detail::reject_unknown_keys(acq, {"fs_hz", "n_points", "n_frames", "seed"},
                              "acquisition");
  cfg.acquisition.fs_hz = detail::get_or(acq, "fs_hz", 256e9);
  cfg.acquisition.n_points = detail::get_or(acq, "n_points", 5121);
  cfg.acquisition.n_frames = detail::get_or(acq, "n_frames", 5000);
  cfg.acquisition.seed = detail::get_or<std::uint64_t>(acq, "seed", 1);
  if (!(cfg.acquisition.fs_hz > 0.0) || cfg.acquisition.n_points < 2 ||
      cfg.acquisition.n_frames < 1)
    throw ConfigError("config: invalid acquisition parameters");

  const auto mode = j.value("mode", nlohmann::json::object());
  detail::reject_unknown_keys(mode, {"shape", "gamma", "period_s", "table"}, "mode");
  cfg.mode.shape = detail::mode_shape_from_string(
      detail::get_or<std::string>(mode, "shape", "polynomial-gaussian"));
  cfg.mode.gamma = detail::get_or(mode, "gamma", 7.2e10);
  cfg.mode.period_s = detail::get_or(mode, "period_s", 40e-12);
  cfg.mode.table = detail::get_or(mode, "table", std::vector<double>{});

  const auto ana = j.value("analysis", nlohmann::json::object());
  detail::reject_unknown_keys(ana, {"max_lag", "band_limit_hz", "band_frame_stride"},
                              "analysis");
  cfg.analysis.max_lag = detail::get_or(ana, "max_lag", 128);
  cfg.analysis.band_limit_hz = detail::get_or(ana, "band_limit_hz", 66e9);
  cfg.analysis.band_frame_stride = detail::get_or(ana, "band_frame_stride", 5);
  if (cfg.analysis.max_lag < 4 || cfg.analysis.band_frame_stride < 1 ||
      !(cfg.analysis.band_limit_hz > 0.0))
    throw ConfigError("config: invalid analysis parameters");

  if (j.contains("lock")) {
    const auto& lk = j.at("lock");
    detail::reject_unknown_keys(lk,
                                {"cycle_s", "control_s", "measure_s", "n_loops",
                                 "probe_detunings_hz", "drift_rad2_per_s",
                                 "servo_bandwidth_hz", "n_cycles"},
                                "lock");
    LockSection sect;
    sect.lock.cycle_s = detail::get_or(lk, "cycle_s", 400e-6);
    sect.lock.control_s = detail::get_or(lk, "control_s", 360e-6);
    sect.lock.measure_s = detail::get_or(lk, "measure_s", 40e-6);
    sect.lock.n_loops = detail::get_or(lk, "n_loops", 7);
    sect.lock.probe_detunings_hz =
        detail::get_or(lk, "probe_detunings_hz", std::vector<double>{0.8e6, 0.5e6});
    sect.lock.drift_rad2_per_s = detail::get_or(lk, "drift_rad2_per_s", 0.0);
    sect.lock.servo_bandwidth_hz = detail::get_or(lk, "servo_bandwidth_hz", 1e4);
    sect.n_cycles = detail::get_or(lk, "n_cycles", 50);
    try {
      sect.lock.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (sect.n_cycles < 1) throw ConfigError("config: lock.n_cycles must be >= 1");
    cfg.lock = sect;
  }

  if (j.contains("output")) {
    const auto& out = j.at("output");
    detail::reject_unknown_keys(out, {"dir"}, "output");
    if (out.contains("dir")) cfg.output_dir = out.at("dir").get<std::string>();
  }
  if (j.contains("metadata")) {
    if (!j.at("metadata").is_object())
      throw ConfigError("config: \"metadata\" must be an object");
    cfg.metadata = j.at("metadata");
  }
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

}  // namespace eprsim
