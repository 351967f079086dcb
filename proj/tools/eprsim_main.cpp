// Command-line front end: predict | simulate | analyze | sweep-gain | fit | report.
// Exit codes: 0 ok, 2 config error, 3 model error, 4 I/O error.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eprsim/eprsim.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_json(const ordered_json& j, const std::string& path) {
  if (path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw eprsim::IoError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw eprsim::IoError("short write to " + path);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw eprsim::IoError("cannot create directory " + dir + ": " + ec.message());
}

struct CommonArgs {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool reproducible = false;
};

ordered_json run_header(const eprsim::RunConfig& cfg, std::uint64_t seed,
                        bool reproducible) {
  ordered_json j;
  j["seed"] = seed;
  j["params"] = eprsim::experiment_params_to_json(cfg.params);
  j["acquisition"] = {{"fs_hz", cfg.acquisition.fs_hz},
                      {"n_points", cfg.acquisition.n_points},
                      {"n_frames", cfg.acquisition.n_frames}};
  if (!cfg.metadata.is_null()) j["metadata"] = cfg.metadata;
  if (!reproducible) j["generated_at"] = timestamp_utc();
  return j;
}

int cmd_predict(const CommonArgs& args) {
  const eprsim::RunConfig cfg = eprsim::load_run_config(args.config_path);
  const auto mode = cfg.make_mode_function();
  const auto rep = eprsim::predict(cfg.params, cfg.acquisition.fs_hz,
                                   cfg.acquisition.n_points, mode,
                                   cfg.analysis.band_limit_hz);
  ordered_json j = eprsim::prediction_to_json(rep);
  j["mode"] = eprsim::mode_to_json(mode);
  write_json(j, args.out.empty() ? "-" : args.out);
  return 0;
}

int cmd_simulate(const CommonArgs& args, int export_frames) {
  const eprsim::RunConfig cfg = eprsim::load_run_config(args.config_path);
  const std::string dir = !args.out.empty() ? args.out : cfg.output_dir.value_or(".");
  ensure_dir(dir);
  const std::uint64_t seed = args.seed.value_or(cfg.acquisition.seed);

  const eprsim::SimulatedRun run = eprsim::simulate_run(cfg, seed);
  eprsim::write_frames(run.x_signal, dir + "/signal_x.frames");
  eprsim::write_frames(run.p_signal, dir + "/signal_p.frames");
  eprsim::write_frames(run.shot, dir + "/shot.frames");
  for (int i = 0; i < export_frames && i < run.x_signal.n_frames; ++i) {
    eprsim::export_frame_csv(run.x_signal, i, dir + "/frame_x_" + std::to_string(i) + ".csv");
    eprsim::export_frame_csv(run.p_signal, i, dir + "/frame_p_" + std::to_string(i) + ".csv");
  }

  ordered_json meta = run_header(cfg, seed, args.reproducible);
  meta["files"] = {"signal_x.frames", "signal_p.frames", "shot.frames"};
  meta["phase_rms_rad"] = run.phase_rms_rad;
  write_json(meta, dir + "/run_meta.json");
  std::cerr << "simulate: wrote 3 frame sets to " << dir << "\n";
  return 0;
}

int cmd_analyze(const CommonArgs& args, const std::string& sx, const std::string& sp,
                const std::string& sh, int export_windows) {
  const eprsim::RunConfig cfg = eprsim::load_run_config(args.config_path);
  const std::string dir = !args.out.empty() ? args.out : cfg.output_dir.value_or(".");
  ensure_dir(dir);

  const eprsim::FrameSet x_signal = eprsim::read_frames(sx);
  const eprsim::FrameSet p_signal = eprsim::read_frames(sp);
  const eprsim::FrameSet shot = eprsim::read_frames(sh);
  eprsim::AnalysisReport rep = eprsim::analyze_run(cfg, x_signal, p_signal, shot);

  ordered_json j = run_header(cfg, x_signal.seed, args.reproducible);
  j["analysis"] = eprsim::analysis_report_to_json(rep);
  write_json(j, dir + "/report.json");
  eprsim::export_autocorr_csv(rep, dir + "/autocorr.csv");
  if (export_windows > 0) {
    eprsim::FrameSet x_head = x_signal;
    eprsim::FrameSet p_head = p_signal;
    const int windows_per_frame = x_signal.n_points / rep.mode.taps();
    const int frames_needed =
        std::min(x_signal.n_frames,
                 (export_windows + windows_per_frame - 1) / std::max(windows_per_frame, 1));
    x_head.n_frames = frames_needed;
    x_head.data.resize(frames_needed * x_head.frame_stride());
    p_head.n_frames = frames_needed;
    p_head.data.resize(frames_needed * p_head.frame_stride());
    eprsim::export_window_samples_csv(x_head, p_head, rep.mode, dir + "/windows.csv");
  }
  std::cerr << "analyze: report written to " << dir << "/report.json\n";
  return 0;
}

int cmd_sweep_gain(const CommonArgs& args, const std::vector<double>& gains_db) {
  const eprsim::RunConfig cfg = eprsim::load_run_config(args.config_path);
  if (gains_db.empty()) throw eprsim::ConfigError("sweep-gain: no gains given");
  std::ostringstream csv;
  csv << "gain_db,x_minus_db,x_plus_db,p_plus_db,p_minus_db\n";
  for (double gdb : gains_db) {
    eprsim::ExperimentParams p = cfg.params;
    p.gain_db = gdb;
    const double eta = eprsim::eta_total(
        p.eta_state,
        eprsim::eta_meas_closed_form(p.gain_linear(), p.eta_opa, p.eta_hd_effective()));
    const double e2r = std::exp(-2.0 * p.r0);
    const double sq = 10.0 * std::log10(1.0 - eta * (1.0 - e2r));
    const double anti = 10.0 * std::log10(1.0 + eta * (1.0 / e2r - 1.0));
    char line[160];
    std::snprintf(line, sizeof(line), "%.6g,%.10g,%.10g,%.10g,%.10g\n", gdb, sq, anti,
                  sq, anti);
    csv << line;
  }
  if (args.out.empty() || args.out == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream out(args.out);
    if (!out) throw eprsim::IoError("cannot open " + args.out);
    out << csv.str();
    if (!out) throw eprsim::IoError("short write to " + args.out);
  }
  return 0;
}

std::vector<eprsim::GainObservation> read_observations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw eprsim::IoError("fit: cannot open " + path);
  std::vector<eprsim::GainObservation> obs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.find_first_not_of("0123456789+-., \teE") != std::string::npos) {
      first = false;  // header row
      continue;
    }
    first = false;
    std::istringstream ss(line);
    std::string g_str, db_str;
    if (!std::getline(ss, g_str, ',') || !std::getline(ss, db_str, ','))
      throw eprsim::ConfigError("fit: bad CSV line \"" + line + "\"");
    try {
      const double gdb = std::stod(g_str);
      obs.push_back({std::pow(10.0, gdb / 10.0), std::stod(db_str)});
    } catch (const std::exception&) {
      throw eprsim::ConfigError("fit: bad CSV line \"" + line + "\"");
    }
  }
  if (obs.empty()) throw eprsim::ConfigError("fit: no observations in " + path);
  return obs;
}

int cmd_fit(const std::string& obs_path, std::optional<double> r0, bool free_r0,
            const std::string& out) {
  const auto obs = read_observations_csv(obs_path);
  std::optional<double> fixed_r0;
  if (!free_r0) {
    if (!r0) throw eprsim::ConfigError("fit: give --r0 VALUE or --free-r0");
    fixed_r0 = *r0;
  }
  const eprsim::FitResult result = eprsim::fit_efficiencies(obs, fixed_r0);
  write_json(eprsim::fit_result_to_json(result), out.empty() ? "-" : out);
  if (!result.converged) {
    std::cerr << "fit: did not converge; best point reported\n";
    return 3;
  }
  return 0;
}

int cmd_report(const CommonArgs& args) {
  const eprsim::RunConfig cfg = eprsim::load_run_config(args.config_path);
  const std::string dir = !args.out.empty() ? args.out : cfg.output_dir.value_or(".");
  ensure_dir(dir);
  const std::uint64_t seed = args.seed.value_or(cfg.acquisition.seed);

  const auto mode = cfg.make_mode_function();
  const auto prediction = eprsim::predict(cfg.params, cfg.acquisition.fs_hz,
                                          cfg.acquisition.n_points, mode,
                                          cfg.analysis.band_limit_hz);
  const eprsim::SimulatedRun run = eprsim::simulate_run(cfg, seed);
  eprsim::AnalysisReport analysis =
      eprsim::analyze_run(cfg, run.x_signal, run.p_signal, run.shot);
  analysis.phase_rms_rad = run.phase_rms_rad;

  ordered_json j = run_header(cfg, seed, args.reproducible);
  j["prediction"] = eprsim::prediction_to_json(prediction);
  j["analysis"] = eprsim::analysis_report_to_json(analysis);
  ordered_json consistency;
  for (const auto& [name, measured] : analysis.noise_power_db) {
    double predicted = prediction.pointwise.x_plus_db;
    if (name == "x_minus") predicted = prediction.pointwise.x_minus_db;
    if (name == "p_plus") predicted = prediction.pointwise.p_plus_db;
    if (name == "p_minus") predicted = prediction.pointwise.p_minus_db;
    consistency[name + "_delta_db"] = measured - predicted;
  }
  j["predict_vs_analyze"] = consistency;
  if (run.lock_residual) {
    j["lock"] = {{"pooled_rms_rad", run.lock_residual->pooled_rms_rad},
                 {"windows", run.lock_residual->per_window_rms_rad.size()}};
  }
  write_json(j, dir + "/report.json");
  eprsim::export_autocorr_csv(analysis, dir + "/autocorr.csv");
  std::cerr << "report: written to " << dir << "/report.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EPR correlation simulator: Gaussian-state predictions, trace "
               "synthesis, and quantum-correlation analysis"};
  app.require_subcommand(1);

  CommonArgs args;
  int export_frames = 0;
  int export_windows = 0;
  std::string signal_x, signal_p, shot_path, observations;
  std::vector<double> gains_db;
  std::optional<double> fit_r0;
  bool free_r0 = false;

  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    if (needs_config)
      sub->add_option("--config", args.config_path, "run configuration JSON")
          ->required()
          ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output file or directory");
    sub->add_flag("--reproducible", args.reproducible,
                  "omit timestamps so outputs are byte-identical per seed");
  };

  CLI::App* predict = app.add_subcommand("predict", "closed-form report, no synthesis");
  add_common(predict);

  CLI::App* simulate = app.add_subcommand("simulate", "synthesize frame sets");
  add_common(simulate);
  simulate->add_option("--seed", [&args](const std::vector<std::string>& v) {
    args.seed = std::stoull(v.at(0));
    return true;
  }, "override the config seed");
  simulate->add_option("--export-frame-csv", export_frames,
                       "also write the first N frames as CSV");

  CLI::App* analyze = app.add_subcommand("analyze", "analyze frame sets");
  add_common(analyze);
  analyze->add_option("--signal-x", signal_x, "x-configured signal frames")
      ->required()->check(CLI::ExistingFile);
  analyze->add_option("--signal-p", signal_p, "p-configured signal frames")
      ->required()->check(CLI::ExistingFile);
  analyze->add_option("--shot", shot_path, "shot reference frames")
      ->required()->check(CLI::ExistingFile);
  analyze->add_option("--export-windows", export_windows,
                      "also write the first N wavepacket window samples as CSV");

  CLI::App* sweep = app.add_subcommand("sweep-gain", "closed-form gain sweep CSV");
  add_common(sweep);
  sweep->add_option("--gains-db", gains_db, "gain values in dB")->required();

  CLI::App* fit = app.add_subcommand("fit", "fit (eta_pre, eta_post) to a gain sweep");
  fit->add_option("--observations", observations, "CSV of gain_db,level_db")
      ->required()->check(CLI::ExistingFile);
  fit->add_option("--r0", [&fit_r0](const std::vector<std::string>& v) {
    fit_r0 = std::stod(v.at(0));
    return true;
  }, "fix the squeezing parameter");
  fit->add_flag("--free-r0", free_r0, "fit r0 as a third parameter");
  fit->add_option("--out", args.out, "output file (default stdout)");

  CLI::App* report = app.add_subcommand("report", "predict + simulate + analyze in one go");
  add_common(report);
  report->add_option("--seed", [&args](const std::vector<std::string>& v) {
    args.seed = std::stoull(v.at(0));
    return true;
  }, "override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (predict->parsed()) return cmd_predict(args);
    if (simulate->parsed()) return cmd_simulate(args, export_frames);
    if (analyze->parsed())
      return cmd_analyze(args, signal_x, signal_p, shot_path, export_windows);
    if (sweep->parsed()) return cmd_sweep_gain(args, gains_db);
    if (fit->parsed()) return cmd_fit(observations, fit_r0, free_r0, args.out);
    if (report->parsed()) return cmd_report(args);
  } catch (const eprsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const eprsim::ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const eprsim::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
