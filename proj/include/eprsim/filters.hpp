#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace eprsim {

enum class FilterKind {
  OnePoleLowpass,
  BrickwallLowpass,
  GaussianLowpass,  // cutoff field holds the FWHM
  OnePoleHighpass,
};

struct FilterStage {
  FilterKind kind = FilterKind::OnePoleLowpass;
  double cutoff_hz = 0.0;

  void validate() const {
    if (!(cutoff_hz > 0.0))
      throw std::invalid_argument("FilterStage: cutoff must be positive");
  }
};

/// Ordered cascade of passive filter stages; |H(f)| <= 1 everywhere.
struct TransferChain {
  std::vector<FilterStage> stages;

  void validate() const {
    for (const auto& st : stages) st.validate();
  }
};

inline std::complex<double> stage_response(const FilterStage& st, double f) {
  switch (st.kind) {
    case FilterKind::OnePoleLowpass:
      return 1.0 / std::complex<double>(1.0, f / st.cutoff_hz);
    case FilterKind::BrickwallLowpass:
      return f <= st.cutoff_hz ? 1.0 : 0.0;
    case FilterKind::GaussianLowpass: {
      const double sigma = 0.5 * st.cutoff_hz / std::sqrt(2.0 * std::log(2.0));
      const double u = f / sigma;
      return std::exp(-0.5 * u * u);
    }
    case FilterKind::OnePoleHighpass: {
      const std::complex<double> jf(0.0, f / st.cutoff_hz);
      return jf / (1.0 + jf);
    }
  }
  throw std::invalid_argument("stage_response: unknown filter kind");
}

/// Complex amplitude response of the whole chain at frequency f >= 0.
inline std::complex<double> chain_response(const TransferChain& chain, double f) {
  if (f < 0.0) throw std::invalid_argument("chain_response: f must be >= 0");
  std::complex<double> h(1.0, 0.0);
  for (const auto& st : chain.stages) h *= stage_response(st, f);
  return h;
}

inline double chain_power_response(const TransferChain& chain, double f) {
  return std::norm(chain_response(chain, f));
}

/// Default detection chain: 70-GHz homodyne detector, amplifier passband
/// 90 kHz - 66 GHz (one-pole edges), 66-GHz brickwall connectors, and a
/// 113-GHz oscilloscope front end.
inline TransferChain default_detection_chain() {
  TransferChain c;
  c.stages = {
      {FilterKind::OnePoleLowpass, 70e9},
      {FilterKind::OnePoleHighpass, 90e3},
      {FilterKind::OnePoleLowpass, 66e9},
      {FilterKind::BrickwallLowpass, 66e9},
      {FilterKind::OnePoleLowpass, 113e9},
  };
  return c;
}

}  // namespace eprsim
