#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "eprsim/lock.hpp"

using namespace eprsim;

namespace {

LockConfig default_lock(double drift, double servo_bw = 1e4) {
  LockConfig cfg;
  cfg.drift_rad2_per_s = drift;
  cfg.servo_bandwidth_hz = servo_bw;
  return cfg;
}

}  // namespace

TEST_CASE("no drift means no residual") {
  const auto res = simulate_residual_phase(default_lock(0.0), 20, 1);
  CHECK(res.pooled_rms_rad == 0.0);
}

TEST_CASE("fast servo and short window drive the residual to zero") {
  // residual ~ sqrt(D * tau_m / 2) once the servo tracks perfectly, so a
  // shrinking window with modest drift sends it to zero
  LockConfig cfg = default_lock(1.0, 1e9);
  cfg.measure_s = 1e-7;
  cfg.control_s = cfg.cycle_s - cfg.measure_s;
  const auto res = simulate_residual_phase(cfg, 20, 2, 1 << 16);
  CHECK(res.pooled_rms_rad < 5e-3);
}

TEST_CASE("free drift grows like a random walk over the window") {
  // near-perfect servo during control, pure diffusion during measurement:
  // window-averaged variance is D * tau_m / 2
  const double drift = 2e5;  // rad^2/s
  LockConfig cfg = default_lock(drift, 1e8);
  const auto res = simulate_residual_phase(cfg, 400, 3);
  const double want_rms = std::sqrt(drift * cfg.measure_s / 2.0);
  CHECK(res.pooled_rms_rad == Catch::Approx(want_rms).epsilon(0.1));
}

TEST_CASE("residual grows with drift and with window length") {
  double prev = -1.0;
  for (double drift : {1e3, 1e4, 1e5}) {
    const auto res = simulate_residual_phase(default_lock(drift, 1e8), 200, 4);
    CHECK(res.pooled_rms_rad > prev);
    prev = res.pooled_rms_rad;
  }
  LockConfig longer = default_lock(1e4, 1e8);
  longer.cycle_s = 800e-6;
  longer.control_s = 720e-6;
  longer.measure_s = 80e-6;
  const auto long_res = simulate_residual_phase(longer, 200, 4);
  const auto short_res = simulate_residual_phase(default_lock(1e4, 1e8), 200, 4);
  CHECK(long_res.pooled_rms_rad > short_res.pooled_rms_rad);
}

TEST_CASE("residual simulation is deterministic per seed") {
  const auto a = simulate_residual_phase(default_lock(1e4), 30, 7);
  const auto b = simulate_residual_phase(default_lock(1e4), 30, 7);
  const auto c = simulate_residual_phase(default_lock(1e4), 30, 8);
  CHECK(a.residual_rad == b.residual_rad);
  CHECK(a.residual_rad != c.residual_rad);
}

TEST_CASE("lock config validation") {
  LockConfig bad;
  bad.control_s = 100e-6;  // control + measure != cycle
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  LockConfig neg = default_lock(-1.0);
  CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
}

TEST_CASE("phase degradation") {
  SECTION("zero residual phase changes nothing") {
    CHECK(degrade_with_phase(0.05, 5.0, 0.0) == 0.05);
  }
  SECTION("isotropic variances are immune to phase error") {
    for (double rms : {0.01, 0.3, 1.0})
      CHECK(degrade_with_phase(0.7, 0.7, rms) == Catch::Approx(0.7).epsilon(1e-14));
  }
  SECTION("matches a Gauss-Hermite quadrature oracle") {
    // -10 dB squeezed / +10 dB antisqueezed, 30 mrad rms
    const double vt = 0.05, vo = 5.0, sigma = 0.03;
    // 64-node Gauss-Hermite via Newton on Hermite polynomials would be
    // overkill; a fine trapezoid over +-8 sigma is an adequate oracle here.
    double num = 0.0, den = 0.0;
    const int steps = 40001;
    for (int i = 0; i < steps; ++i) {
      const double phi = -8.0 * sigma + 16.0 * sigma * i / (steps - 1);
      const double w = std::exp(-0.5 * phi * phi / (sigma * sigma));
      num += w * (vt * std::cos(phi) * std::cos(phi) + vo * std::sin(phi) * std::sin(phi));
      den += w;
    }
    const double oracle = num / den;
    CHECK(degrade_with_phase(vt, vo, sigma) == Catch::Approx(oracle).epsilon(1e-6));
    CHECK(degrade_with_phase(vt, vo, sigma, PhaseAveraging::SecondOrder) ==
          Catch::Approx(oracle).epsilon(1e-3));
  }
  SECTION("result stays between the two variances") {
    for (double rms : {0.0, 0.1, 0.5, 2.0, 10.0}) {
      const double v = degrade_with_phase(0.1, 3.0, rms);
      CHECK(v >= 0.1);
      CHECK(v <= 3.0);
      const double w = degrade_with_phase(3.0, 0.1, rms);
      CHECK(w >= 0.1);
      CHECK(w <= 3.0);
    }
  }
}
