#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "eprsim/pipeline.hpp"
#include "eprsim/report.hpp"

using namespace eprsim;

namespace {

RunConfig small_run_config(int n_frames = 400, int n_points = 1023) {
  RunConfig cfg;
  cfg.params.r0 = r0_for_zero_freq_db(-4.5, 0.714);
  cfg.params.eta_state = 0.94;
  cfg.params.eta_opa = 0.80;
  cfg.params.eta_hd = 0.24;
  cfg.params.gain_db = 17.745169657285501;
  cfg.params.chain = default_detection_chain();
  cfg.params.electronic_noise = {{30e9, 23.0}, {60e9, 10.2}, {66e9, 7.0}};
  cfg.acquisition.fs_hz = 256e9;
  cfg.acquisition.n_points = n_points;
  cfg.acquisition.n_frames = n_frames;
  cfg.acquisition.seed = 7777;
  cfg.analysis.max_lag = 64;
  cfg.analysis.band_frame_stride = 2;
  return cfg;
}

}  // namespace

TEST_CASE("in-process run reproduces the prediction within statistics") {
  const RunConfig cfg = small_run_config();
  const SimulatedRun run = simulate_run(cfg);
  const AnalysisReport rep = analyze_run(cfg, run.x_signal, run.p_signal, run.shot);
  const PredictionReport pred =
      predict(cfg.params, cfg.acquisition.fs_hz, cfg.acquisition.n_points,
              cfg.make_mode_function(), cfg.analysis.band_limit_hz);

  CHECK(rep.noise_power_db.at("x_minus") ==
        Catch::Approx(pred.pointwise.x_minus_db).margin(0.1));
  CHECK(rep.noise_power_db.at("p_plus") ==
        Catch::Approx(pred.pointwise.p_plus_db).margin(0.1));
  CHECK(rep.wavepacket_db.at("x_minus") ==
        Catch::Approx(pred.wavepacket.x_minus_db).margin(0.15));
  CHECK(rep.band_limited_db.at("x_minus") ==
        Catch::Approx(pred.band_limited.x_minus_db).margin(0.1));
  CHECK(rep.duan == Catch::Approx(pred.pointwise.duan).margin(0.01));
  CHECK(rep.duan < 1.0);
}

TEST_CASE("frame sets of one run are role-independent substreams") {
  const RunConfig cfg = small_run_config(4, 257);
  const SimulatedRun run = simulate_run(cfg);
  CHECK(run.x_signal.seed != run.p_signal.seed);
  CHECK(run.x_signal.seed != run.shot.seed);
  CHECK(run.x_signal.data != run.p_signal.data);
  // same master seed reproduces everything
  const SimulatedRun again = simulate_run(cfg);
  CHECK(run.x_signal.data == again.x_signal.data);
  CHECK(run.shot.data == again.shot.data);
}

TEST_CASE("a lock section injects residual phase and degrades squeezing") {
  RunConfig cfg = small_run_config(120, 1023);
  LockSection lock;
  lock.lock.drift_rad2_per_s = 500.0;  // strong drift so the effect is visible
  lock.lock.servo_bandwidth_hz = 1e5;
  lock.n_cycles = 30;
  cfg.lock = lock;

  std::optional<ResidualPhaseResult> residual;
  const ExperimentParams effective = effective_params(cfg, &residual, cfg.acquisition.seed);
  REQUIRE(residual.has_value());
  CHECK(effective.phase_rms_rad > 0.0);
  CHECK(effective.phase_rms_rad == Catch::Approx(residual->pooled_rms_rad));

  // mixing with the antisqueezed quadrature raises the squeezed level
  // (evaluate inside the passband; the highpass zeroes f = 0)
  const PsdPoint clean = epr_psd(small_run_config().params, QuadConfig::X, 1e9);
  const PsdPoint noisy = epr_psd(effective, QuadConfig::X, 1e9);
  const double clean_min = clean.signal(0, 0) - clean.signal(0, 1);
  const double noisy_min = noisy.signal(0, 0) - noisy.signal(0, 1);
  CHECK(noisy_min > clean_min);

  const SimulatedRun run = simulate_run(cfg);
  CHECK(run.phase_rms_rad == Catch::Approx(effective.phase_rms_rad));
  CHECK(run.lock_residual.has_value());
}

TEST_CASE("analyze_run rejects inconsistent frame sets") {
  const RunConfig cfg = small_run_config(4, 257);
  const SimulatedRun run = simulate_run(cfg);
  SECTION("swapped configurations") {
    CHECK_THROWS_AS(analyze_run(cfg, run.p_signal, run.x_signal, run.shot), ModelError);
  }
  SECTION("shot in a signal slot") {
    CHECK_THROWS_AS(analyze_run(cfg, run.shot, run.p_signal, run.shot), ModelError);
  }
  SECTION("mismatched sampling rate") {
    FrameSet other = run.shot;
    other.fs_hz /= 2;
    CHECK_THROWS_AS(analyze_run(cfg, run.x_signal, run.p_signal, other), ModelError);
  }
}

TEST_CASE("report JSON carries the mode metadata and finite values") {
  const RunConfig cfg = small_run_config(40, 1023);
  const SimulatedRun run = simulate_run(cfg);
  const AnalysisReport rep = analyze_run(cfg, run.x_signal, run.p_signal, run.shot);
  const auto j = analysis_report_to_json(rep);
  CHECK(j.at("mode").at("shape") == "polynomial-gaussian");
  CHECK(j.at("mode").at("taps") == 10);
  CHECK(j.at("noise_power_db").size() == 4);
  CHECK(j.at("correlation_width_s").size() == 2);
  CHECK(std::isfinite(j.at("duan").get<double>()));
}
