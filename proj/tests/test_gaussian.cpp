#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "eprsim/gaussian.hpp"
#include "eprsim/rng.hpp"

using namespace eprsim;

namespace {

// Normalized variance of a squeezed input through the explicit measurement
// chain: squeeze -> PSA (loss then gain) -> detector loss, referenced to
// vacuum through the identical chain.
double chain_normalized_variance(double r, double gain, double eta_opa, double eta_hd) {
  auto through = [&](double r_in) {
    GaussianState s = vacuum(1);
    if (r_in > 0.0) s = apply_squeezer(s, 0, r_in, 0.0);
    s = apply_psa(s, 0, {gain, 0.0, eta_opa});
    s = apply_loss(s, 0, eta_hd);
    return quadrature_variance(s, 0, 0.0);
  };
  return through(r) / through(0.0);
}

}  // namespace

TEST_CASE("vacuum state") {
  const GaussianState v1 = vacuum(1);
  CHECK(v1.cov(0, 0) == 0.5);
  CHECK(v1.cov(1, 1) == 0.5);
  CHECK(v1.cov(0, 1) == 0.0);
  CHECK(v1.mean.isZero());

  const GaussianState v2 = vacuum(2);
  CHECK(v2.cov.isApprox(0.5 * Eigen::MatrixXd::Identity(4, 4)));

  CHECK_THROWS_AS(vacuum(0), std::invalid_argument);
}

TEST_CASE("squeezer acts on the chosen quadrature") {
  const GaussianState v = vacuum(1);

  SECTION("r = 0 is the identity") {
    const GaussianState s = apply_squeezer(v, 0, 0.0, 0.7);
    CHECK(s.cov.isApprox(v.cov, 1e-15));
  }
  SECTION("variances scale by e^{-+2r}") {
    const double r = 0.8;
    const GaussianState s = apply_squeezer(v, 0, r, 0.0);
    CHECK(quadrature_variance(s, 0, 0.0) ==
          Catch::Approx(0.5 * std::exp(-2.0 * r)).epsilon(1e-13));
    CHECK(quadrature_variance(s, 0, std::numbers::pi / 2) ==
          Catch::Approx(0.5 * std::exp(2.0 * r)).epsilon(1e-13));
    // symplectic: unit determinant of the mode block transform
    CHECK(s.cov.determinant() == Catch::Approx(0.25).epsilon(1e-12));
  }
  SECTION("squeezing along a rotated angle") {
    const double r = 0.5, theta = 1.1;
    const GaussianState s = apply_squeezer(v, 0, r, theta);
    CHECK(quadrature_variance(s, 0, theta) ==
          Catch::Approx(0.5 * std::exp(-2.0 * r)).epsilon(1e-13));
  }
  SECTION("the -10.15 dB squeezing level solves the loss equation") {
    // scalar oracle: 10^{-0.45} = eta e^{-2r} + (1 - eta) with eta = 0.714
    const double eta = 0.714;
    const double e2r = (std::pow(10.0, -0.45) - (1.0 - eta)) / eta;
    const double r = -0.5 * std::log(e2r);
    const GaussianState s = apply_squeezer(v, 0, r, 0.0);
    const double shot_units = quadrature_variance(s, 0, 0.0) / 0.5;
    CHECK(shot_units == Catch::Approx(e2r).epsilon(1e-12));
    CHECK(10.0 * std::log10(shot_units) == Catch::Approx(-10.15).margin(0.02));
  }
  SECTION("negative r is rejected") {
    CHECK_THROWS_AS(apply_squeezer(v, 0, -0.1, 0.0), std::invalid_argument);
  }
}

TEST_CASE("beamsplitter") {
  SECTION("vacuum is invariant for any transmissivity") {
    const GaussianState v = vacuum(2);
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const GaussianState out = apply_beamsplitter(v, 0, 1, t, 0.4);
      CHECK(out.cov.isApprox(v.cov, 1e-13));
    }
  }
  SECTION("orthogonally squeezed inputs give the EPR combos") {
    const double r = 1.1;
    const GaussianState e = epr_state(r);
    Eigen::VectorXd x_minus(4), p_plus(4);
    const double c = std::sqrt(0.5);
    x_minus << c, 0, -c, 0;
    p_plus << 0, c, 0, c;
    CHECK(combo_variance(e, x_minus) ==
          Catch::Approx(0.5 * std::exp(-2.0 * r)).epsilon(1e-12));
    CHECK(combo_variance(e, p_plus) ==
          Catch::Approx(0.5 * std::exp(-2.0 * r)).epsilon(1e-12));
  }
  SECTION("T = 1 is the identity") {
    GaussianState s = apply_squeezer(vacuum(2), 0, 0.6, 0.3);
    const GaussianState out = apply_beamsplitter(s, 0, 1, 1.0);
    CHECK(out.cov.isApprox(s.cov, 1e-13));
  }
  SECTION("invalid arguments") {
    const GaussianState v = vacuum(2);
    CHECK_THROWS_AS(apply_beamsplitter(v, 0, 0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(apply_beamsplitter(v, 0, 1, 1.2), std::invalid_argument);
    CHECK_THROWS_AS(apply_beamsplitter(v, 0, 2, 0.5), std::invalid_argument);
  }
}

TEST_CASE("loss channel") {
  const double r = 0.9;
  const GaussianState s = apply_squeezer(vacuum(1), 0, r, 0.0);

  SECTION("eta = 1 is the identity") {
    CHECK(apply_loss(s, 0, 1.0).cov.isApprox(s.cov, 1e-15));
  }
  SECTION("eta = 0 resets the mode to vacuum") {
    const GaussianState out = apply_loss(s, 0, 0.0);
    CHECK(out.cov.isApprox(vacuum(1).cov, 1e-15));
    CHECK(out.mean.isZero());
  }
  SECTION("partial loss mixes in vacuum") {
    const double eta = 0.714;
    const GaussianState out = apply_loss(s, 0, eta);
    const double want = eta * std::exp(-2.0 * r) + (1.0 - eta);
    CHECK(quadrature_variance(out, 0, 0.0) / 0.5 == Catch::Approx(want).epsilon(1e-13));
  }
  SECTION("out-of-range eta") {
    CHECK_THROWS_AS(apply_loss(s, 0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(apply_loss(s, 0, 1.1), std::invalid_argument);
  }
}

TEST_CASE("phase-sensitive amplifier") {
  SECTION("unit gain and efficiency is the identity") {
    const GaussianState s = apply_squeezer(vacuum(1), 0, 0.4, 0.2);
    CHECK(apply_psa(s, 0, {1.0, 0.9, 1.0}).cov.isApprox(s.cov, 1e-13));
  }
  SECTION("gain scales variances by G and 1/G") {
    const GaussianState out = apply_psa(vacuum(1), 0, {100.0, 0.0, 1.0});
    CHECK(quadrature_variance(out, 0, 0.0) == Catch::Approx(50.0).epsilon(1e-13));
    CHECK(quadrature_variance(out, 0, std::numbers::pi / 2) ==
          Catch::Approx(0.005).epsilon(1e-13));
  }
  SECTION("explicit chain reproduces the closed-form efficiency") {
    // normalized variance == 1 - eta_meas (1 - e^{-2r}) over a parameter grid
    for (double r : {0.0, 0.5, 1.0, 1.5, 2.0})
      for (double gdb : {0.0, 0.625, 1.25, 1.875, 2.5})
        for (double eta_opa : {0.1, 0.325, 0.55, 0.775, 1.0})
          for (double eta_hd : {0.1, 0.325, 0.55, 0.775, 1.0}) {
            const double gain = std::pow(10.0, gdb);
            const double got = chain_normalized_variance(r, gain, eta_opa, eta_hd);
            const double eta = eta_meas_closed_form(gain, eta_opa, eta_hd);
            const double want = 1.0 - eta * (1.0 - std::exp(-2.0 * r));
            REQUIRE(std::abs(got - want) < 1e-12);
          }
  }
  SECTION("amplification preserves the side of shot noise") {
    for (double r : {0.2, 0.8, 1.5})
      for (double gain : {2.0, 31.6, 316.0}) {
        const double below = chain_normalized_variance(r, gain, 0.8, 0.24);
        CHECK(below < 1.0);
        // antisqueezed input measured through the same chain stays above shot
        auto through = [&](double scale) {
          GaussianState s = vacuum(1);
          s = detail::apply_single_mode(s, 0, detail::quadrature_scaler(scale, 0.0));
          s = apply_psa(s, 0, {gain, 0.0, 0.8});
          s = apply_loss(s, 0, 0.24);
          return quadrature_variance(s, 0, 0.0);
        };
        CHECK(through(std::exp(r)) / through(1.0) > 1.0);
      }
  }
  SECTION("parameter validation") {
    CHECK_THROWS_AS(apply_psa(vacuum(1), 0, {0.5, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(apply_psa(vacuum(1), 0, {2.0, 0.0, 1.5}), std::invalid_argument);
  }
}

TEST_CASE("quadrature and combo variances") {
  SECTION("vacuum gives 1/2 at every angle") {
    for (double theta : {0.0, 0.3, 1.2})
      CHECK(quadrature_variance(vacuum(1), 0, theta) == Catch::Approx(0.5));
  }
  SECTION("rotated measurement of a squeezed state") {
    const double r = 0.7;
    const GaussianState s = apply_squeezer(vacuum(1), 0, r, 0.0);
    const double want = 0.25 * (std::exp(-2.0 * r) + std::exp(2.0 * r));
    CHECK(quadrature_variance(s, 0, std::numbers::pi / 4) ==
          Catch::Approx(want).epsilon(1e-13));
  }
  SECTION("vacuum combo") {
    Eigen::VectorXd c(4);
    const double inv = std::sqrt(0.5);
    c << inv, 0, -inv, 0;
    CHECK(combo_variance(vacuum(2), c) == Catch::Approx(0.5).epsilon(1e-14));
  }
  SECTION("antisqueezed combo of the EPR state") {
    const double r = 0.9;
    Eigen::VectorXd x_plus(4);
    const double inv = std::sqrt(0.5);
    x_plus << inv, 0, inv, 0;
    CHECK(combo_variance(epr_state(r), x_plus) ==
          Catch::Approx(0.5 * std::exp(2.0 * r)).epsilon(1e-12));
  }
  SECTION("all-zero coefficients are rejected") {
    CHECK_THROWS_AS(combo_variance(vacuum(2), Eigen::VectorXd::Zero(4)),
                    std::invalid_argument);
  }
}

TEST_CASE("closed-form measurement efficiency") {
  SECTION("no amplification gives the bare product") {
    CHECK(eta_meas_closed_form(1.0, 0.8, 0.24) == Catch::Approx(0.8 * 0.24).epsilon(1e-15));
  }
  SECTION("large gain recovers the OPA efficiency") {
    CHECK(std::abs(eta_meas_closed_form(1e16, 0.8, 0.24) - 0.8) < 1e-12);
  }
  SECTION("published operating point") {
    const double eta = eta_meas_closed_form(std::pow(10.0, 2.5), 0.80, 0.24);
    CHECK(eta == Catch::Approx(0.792).margin(5e-4));
    CHECK(std::abs(eta - 0.76) < 0.05);
  }
  SECTION("gains below 1 are rejected") {
    CHECK_THROWS_AS(eta_meas_closed_form(0.0, 0.8, 0.24), std::invalid_argument);
    CHECK_THROWS_AS(eta_meas_closed_form(0.5, 0.8, 0.24), std::invalid_argument);
  }
  SECTION("total efficiency is the product") {
    CHECK(eta_total(0.94, 0.76) == Catch::Approx(0.7144).epsilon(1e-15));
  }
}

TEST_CASE("Duan inseparability sum") {
  SECTION("two vacua sit exactly on the boundary") {
    CHECK(duan_sum(vacuum(2), 0, 1) == Catch::Approx(1.0).epsilon(1e-14));
  }
  SECTION("ideal EPR gives e^{-2r}") {
    for (double r = 0.0; r <= 2.0 + 1e-9; r += 0.25)
      CHECK(duan_sum(epr_state(r), 0, 1) ==
            Catch::Approx(std::exp(-2.0 * r)).margin(1e-12));
  }
  SECTION("two combos at -4.0 dB give 0.398") {
    const double value = 0.5 * std::pow(10.0, -0.4) + 0.5 * std::pow(10.0, -0.4);
    CHECK(value == Catch::Approx(0.398).margin(5e-4));
  }
  SECTION("loss never decreases the Duan sum") {
    for (double r : {0.3, 0.9, 1.6}) {
      double prev = duan_sum(epr_state(r), 0, 1);
      for (double eta : {0.9, 0.7, 0.5, 0.3, 0.1}) {
        for (int mode : {0, 1}) {
          const double with_loss = duan_sum(apply_loss(epr_state(r), mode, eta), 0, 1);
          CHECK(with_loss >= prev - 1e-12);
        }
        prev = duan_sum(apply_loss(epr_state(r), 0, eta), 0, 1);
      }
    }
  }
  SECTION("identical modes are rejected") {
    CHECK_THROWS_AS(duan_sum(vacuum(2), 1, 1), std::invalid_argument);
  }
}

TEST_CASE("uncertainty relation survives random circuits") {
  Xoshiro256pp rng(31337);
  for (int trial = 0; trial < 20; ++trial) {
    GaussianState s = vacuum(3);
    for (int step = 0; step < 8; ++step) {
      const double u = rng.uniform();
      const int mode = static_cast<int>(rng.next() % 3);
      if (u < 0.3) {
        s = apply_squeezer(s, mode, rng.uniform() * 1.5, rng.uniform() * 3.1);
      } else if (u < 0.6) {
        const int other = (mode + 1) % 3;
        s = apply_beamsplitter(s, mode, other, rng.uniform(), rng.uniform() * 6.28);
      } else if (u < 0.8) {
        s = apply_loss(s, mode, rng.uniform());
      } else {
        s = apply_psa(s, mode, {1.0 + 30.0 * rng.uniform(), rng.uniform() * 3.1, 0.9});
      }
      REQUIRE(min_uncertainty_eigenvalue(s) > -1e-10);
      REQUIRE(s.cov.isApprox(s.cov.transpose(), 1e-12));
    }
  }
}
