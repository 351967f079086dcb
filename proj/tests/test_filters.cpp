#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "eprsim/filters.hpp"

using namespace eprsim;

TEST_CASE("empty chain is transparent") {
  TransferChain chain;
  CHECK(chain_response(chain, 0.0) == std::complex<double>(1.0, 0.0));
  CHECK(chain_power_response(chain, 5e9) == 1.0);
}

TEST_CASE("brickwall cuts above the edge") {
  TransferChain chain{{{FilterKind::BrickwallLowpass, 66e9}}};
  CHECK(chain_power_response(chain, 70e9) == 0.0);
  CHECK(chain_power_response(chain, 66e9) == 1.0);
  CHECK(chain_power_response(chain, 1e9) == 1.0);
}

TEST_CASE("one-pole lowpass has its 3-dB point at the cutoff") {
  TransferChain chain{{{FilterKind::OnePoleLowpass, 70e9}}};
  CHECK(chain_power_response(chain, 70e9) == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(chain_power_response(chain, 0.0) == 1.0);
}

TEST_CASE("one-pole highpass passes the band and blocks DC") {
  TransferChain chain{{{FilterKind::OnePoleHighpass, 90e3}}};
  CHECK(chain_power_response(chain, 0.0) == 0.0);
  CHECK(chain_power_response(chain, 90e3) == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(chain_power_response(chain, 1e9) == Catch::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("gaussian lowpass hits half amplitude at FWHM/2") {
  TransferChain chain{{{FilterKind::GaussianLowpass, 6e12}}};
  CHECK(std::abs(chain_response(chain, 3e12)) == Catch::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("composite magnitude never exceeds one") {
  const TransferChain chain = default_detection_chain();
  for (double f = 0.0; f <= 128e9; f += 0.5e9)
    CHECK(chain_power_response(chain, f) <= 1.0 + 1e-15);
}

TEST_CASE("negative frequency and bad cutoffs are rejected") {
  const TransferChain chain = default_detection_chain();
  CHECK_THROWS_AS(chain_response(chain, -1.0), std::invalid_argument);
  FilterStage bad{FilterKind::OnePoleLowpass, 0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
