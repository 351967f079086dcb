#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace eprsim {

/// Complex FFT of a fixed length n. Power-of-two lengths use an iterative
/// radix-2 transform; every other length goes through Bluestein's chirp-z
/// reduction onto the next power of two >= 2n-1. All tables are precomputed
/// at construction so repeated transforms of the same length are cheap and
/// bit-reproducible.
class Fft {
 public:
  using cplx = std::complex<double>;

  explicit Fft(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("Fft: length must be positive");
    if (is_pow2(n)) {
      init_pow2_tables(n, fwd_twiddle_, inv_twiddle_, bitrev_);
    } else {
      m_ = 1;
      while (m_ < 2 * n - 1) m_ <<= 1;
      init_pow2_tables(m_, m_fwd_twiddle_, m_inv_twiddle_, m_bitrev_);
      // chirp w[k] = exp(-i*pi*k^2/n), with k^2 reduced mod 2n to keep the
      // angle argument small and exact
      chirp_.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t sq = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        const double ang = -std::numbers::pi * static_cast<double>(sq) / static_cast<double>(n);
        chirp_[k] = {std::cos(ang), std::sin(ang)};
      }
      // frequency response of the conjugate-chirp filter
      chirp_filter_fft_.assign(m_, cplx{0.0, 0.0});
      chirp_filter_fft_[0] = std::conj(chirp_[0]);
      for (std::size_t k = 1; k < n; ++k) {
        chirp_filter_fft_[k] = std::conj(chirp_[k]);
        chirp_filter_fft_[m_ - k] = std::conj(chirp_[k]);
      }
      pow2_transform(chirp_filter_fft_.data(), m_, m_fwd_twiddle_, m_bitrev_);
    }
  }

  std::size_t size() const { return n_; }

  /// In-place DFT with kernel exp(-2*pi*i*k*n/N).
  void forward(cplx* data) const {
    if (is_pow2(n_)) {
      pow2_transform(data, n_, fwd_twiddle_, bitrev_);
    } else {
      bluestein(data);
    }
  }

  /// In-place inverse DFT, including the 1/N normalization.
  void inverse(cplx* data) const {
    if (is_pow2(n_)) {
      pow2_transform(data, n_, inv_twiddle_, bitrev_);
      const double s = 1.0 / static_cast<double>(n_);
      for (std::size_t i = 0; i < n_; ++i) data[i] *= s;
    } else {
      for (std::size_t i = 0; i < n_; ++i) data[i] = std::conj(data[i]);
      bluestein(data);
      const double s = 1.0 / static_cast<double>(n_);
      for (std::size_t i = 0; i < n_; ++i) data[i] = std::conj(data[i]) * s;
    }
  }

  void forward(std::vector<cplx>& data) const { check_len(data); forward(data.data()); }
  void inverse(std::vector<cplx>& data) const { check_len(data); inverse(data.data()); }

 private:
  static bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

  void check_len(const std::vector<cplx>& d) const {
    if (d.size() != n_) throw std::invalid_argument("Fft: buffer length mismatch");
  }

  static void init_pow2_tables(std::size_t n, std::vector<cplx>& fwd,
                               std::vector<cplx>& inv, std::vector<std::size_t>& rev) {
    fwd.resize(n / 2);
    inv.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      fwd[k] = {std::cos(ang), std::sin(ang)};
      inv[k] = std::conj(fwd[k]);
    }
    rev.resize(n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      rev[i] = r;
    }
  }

  static void pow2_transform(cplx* a, std::size_t n, const std::vector<cplx>& twiddle,
                             const std::vector<std::size_t>& rev) {
    for (std::size_t i = 0; i < n; ++i)
      if (i < rev[i]) std::swap(a[i], a[rev[i]]);
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t step = n / len;
      for (std::size_t blk = 0; blk < n; blk += len) {
        for (std::size_t j = 0; j < half; ++j) {
          const cplx w = twiddle[j * step];
          const cplx u = a[blk + j];
          const cplx v = a[blk + j + half] * w;
          a[blk + j] = u + v;
          a[blk + j + half] = u - v;
        }
      }
    }
  }

  // Allocates its own scratch, so a const Fft can be shared across threads.
  void bluestein(cplx* data) const {
    std::vector<cplx> buf(m_);
    for (std::size_t k = 0; k < n_; ++k) buf[k] = data[k] * chirp_[k];
    pow2_transform(buf.data(), m_, m_fwd_twiddle_, m_bitrev_);
    for (std::size_t k = 0; k < m_; ++k) buf[k] *= chirp_filter_fft_[k];
    pow2_transform(buf.data(), m_, m_inv_twiddle_, m_bitrev_);
    const double s = 1.0 / static_cast<double>(m_);
    for (std::size_t k = 0; k < n_; ++k) data[k] = buf[k] * s * chirp_[k];
  }

  std::size_t n_ = 0;
  std::vector<cplx> fwd_twiddle_, inv_twiddle_;
  std::vector<std::size_t> bitrev_;

  // Bluestein workspace (unused for power-of-two lengths)
  std::size_t m_ = 0;
  std::vector<cplx> m_fwd_twiddle_, m_inv_twiddle_;
  std::vector<std::size_t> m_bitrev_;
  std::vector<cplx> chirp_, chirp_filter_fft_;
};

}  // namespace eprsim
