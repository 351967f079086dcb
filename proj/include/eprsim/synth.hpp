#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "eprsim/errors.hpp"
#include "eprsim/fft.hpp"
#include "eprsim/frames.hpp"
#include "eprsim/parallel.hpp"
#include "eprsim/rng.hpp"
#include "eprsim/spectral.hpp"

namespace eprsim {

/// 2x2 PSD matrix (in flat-shot units) of the two channels at frequency f.
using PsdMatrixFn = std::function<Eigen::Matrix2d(double f)>;

namespace detail {

/// Symmetric square root of a 2x2 PSD matrix via eigendecomposition.
/// Eigenvalues below -tol (relative to the matrix scale) are a model error;
/// small negative round-off is clamped to zero.
inline Eigen::Matrix2d psd_sqrt(const Eigen::Matrix2d& m, double f) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(m);
  Eigen::Vector2d ev = solver.eigenvalues();
  const double scale = std::max(1.0, std::abs(ev(1)));
  for (int i = 0; i < 2; ++i) {
    if (ev(i) < -1e-9 * scale)
      throw ModelError("synthesize: PSD matrix not positive semidefinite at f = " +
                       std::to_string(f));
    if (ev(i) < 0.0) ev(i) = 0.0;
  }
  return solver.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
         solver.eigenvectors().transpose();
}

}  // namespace detail

/// Synthesizes seeded stationary traces whose two-channel statistics match
/// the given PSD matrix on the DFT grid of the frame. Per positive-frequency
/// bin a circular complex Gaussian 2-vector is colored by the matrix square
/// root of the PSD, Hermitian symmetry makes the output real, and both
/// channels come out of a single packed inverse FFT. Frame `i` draws from
/// substream(seed, i), so any frame schedule produces identical output.
inline FrameSet synthesize(const PsdMatrixFn& psd, double fs_hz, int n_points,
                           int n_frames, std::uint64_t seed, FrameKind kind,
                           QuadConfig config) {
  if (n_points < 2) throw std::invalid_argument("synthesize: n_points must be >= 2");
  if (n_frames < 1) throw std::invalid_argument("synthesize: n_frames must be >= 1");
  if (!(fs_hz > 0.0)) throw std::invalid_argument("synthesize: fs must be positive");

  const int n = n_points;
  const int n_pos = (n - 1) / 2;       // bins 1..n_pos carry conjugate partners
  const bool has_nyquist = n % 2 == 0;  // even n: bin n/2 is real

  // Per-bin coloring matrices, shared by all frames.
  std::vector<Eigen::Matrix2d> color(static_cast<std::size_t>(n_pos) + 1 +
                                     (has_nyquist ? 1 : 0));
  for (int k = 0; k < static_cast<int>(color.size()); ++k) {
    const double f = k * fs_hz / n;
    color[k] = detail::psd_sqrt(psd(f), f);
  }

  FrameSet frames;
  frames.kind = kind;
  frames.config = config;
  frames.seed = seed;
  frames.fs_hz = fs_hz;
  frames.n_frames = n_frames;
  frames.n_points = n_points;
  frames.n_channels = 2;
  frames.data.resize(static_cast<std::size_t>(n_frames) * frames.frame_stride());

  const Fft fft(static_cast<std::size_t>(n));
  const double amp = std::sqrt(0.5 * n);  // E|Y_k|^2 = (N/2) * psd

  parallel_for(static_cast<std::size_t>(n_frames), [&](std::size_t frame) {
    Xoshiro256pp rng = substream(seed, frame);
    std::vector<std::complex<double>> packed(static_cast<std::size_t>(n));

    // DC bin: real amplitudes, E[Y0^2] = (N/2) * psd(0)
    {
      double a1, a2;
      rng.normal_pair(a1, a2);
      const Eigen::Vector2d y = amp * (color[0] * Eigen::Vector2d(a1, a2));
      packed[0] = {y(0), y(1)};
    }
    for (int k = 1; k <= n_pos; ++k) {
      double a1, b1, a2, b2;
      rng.normal_pair(a1, b1);
      rng.normal_pair(a2, b2);
      // circular complex gaussians with unit variance: (a + ib)/sqrt(2)
      const std::complex<double> g1(a1 * std::sqrt(0.5), b1 * std::sqrt(0.5));
      const std::complex<double> g2(a2 * std::sqrt(0.5), b2 * std::sqrt(0.5));
      const auto& l = color[static_cast<std::size_t>(k)];
      const std::complex<double> y1 = amp * (l(0, 0) * g1 + l(0, 1) * g2);
      const std::complex<double> y2 = amp * (l(1, 0) * g1 + l(1, 1) * g2);
      // pack ch1 + i*ch2 while keeping each channel Hermitian
      packed[static_cast<std::size_t>(k)] = y1 + std::complex<double>(0, 1) * y2;
      packed[static_cast<std::size_t>(n - k)] =
          std::conj(y1) + std::complex<double>(0, 1) * std::conj(y2);
    }
    if (has_nyquist) {
      double a1, a2;
      rng.normal_pair(a1, a2);
      const auto& l = color[static_cast<std::size_t>(n / 2)];
      const Eigen::Vector2d y = amp * (l * Eigen::Vector2d(a1, a2));
      packed[static_cast<std::size_t>(n / 2)] = {y(0), y(1)};
    }

    fft.inverse(packed.data());

    auto ch1 = frames.channel(static_cast<int>(frame), 0);
    auto ch2 = frames.channel(static_cast<int>(frame), 1);
    for (int i = 0; i < n; ++i) {
      ch1[i] = packed[static_cast<std::size_t>(i)].real();
      ch2[i] = packed[static_cast<std::size_t>(i)].imag();
    }
  });

  return frames;
}

/// Signal traces for one quadrature configuration of the experiment.
inline FrameSet synthesize_signal(const ExperimentParams& params, QuadConfig config,
                                  double fs_hz, int n_points, int n_frames,
                                  std::uint64_t seed) {
  params.validate();
  return synthesize(
      [&params, config](double f) { return epr_psd(params, config, f).signal; },
      fs_hz, n_points, n_frames, seed, FrameKind::Signal, config);
}

/// Shot-noise reference: vacuum input propagated through the identical
/// measurement chain (PSA pump on), channels uncorrelated.
inline FrameSet shot_reference(const ExperimentParams& params, double fs_hz,
                               int n_points, int n_frames, std::uint64_t seed) {
  params.validate();
  return synthesize(
      [&params](double f) {
        const double s = epr_psd(params, QuadConfig::X, f).shot;
        return (Eigen::Matrix2d() << s, 0.0, 0.0, s).finished();
      },
      fs_hz, n_points, n_frames, seed, FrameKind::Shot, QuadConfig::X);
}

}  // namespace eprsim
