#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace eprsim {

// Conventions: hbar = 1, [x, p] = i, vacuum quadrature variance 1/2.
// Quadratures are ordered x1, p1, x2, p2, ... so each mode owns a contiguous
// 2x2 block of the covariance matrix.

/// Multimode Gaussian state: mean vector and covariance matrix.
struct GaussianState {
  int n_modes = 0;
  Eigen::VectorXd mean;  // length 2N
  Eigen::MatrixXd cov;   // 2N x 2N, symmetric
};

/// Phase-sensitive amplifier parameters: linear power gain, amplified
/// quadrature angle, and the OPA's intrinsic efficiency.
struct PsaParams {
  double gain = 1.0;      // linear power gain, >= 1
  double phase = 0.0;     // radians; quadrature at this angle is amplified
  double eta_opa = 1.0;   // in [0, 1]

  void validate() const {
    if (!(gain >= 1.0))
      throw std::invalid_argument("PsaParams: gain must be >= 1 (linear)");
    if (!(eta_opa >= 0.0 && eta_opa <= 1.0))
      throw std::invalid_argument("PsaParams: eta_opa must be in [0, 1]");
  }
};

namespace detail {

inline void check_mode(const GaussianState& s, int mode, const char* what) {
  if (mode < 0 || mode >= s.n_modes)
    throw std::invalid_argument(std::string(what) + ": mode index out of range");
}

/// Applies the 2x2 symplectic `m` to one mode's block of mean and cov.
inline GaussianState apply_single_mode(const GaussianState& s, int mode,
                                       const Eigen::Matrix2d& m) {
  GaussianState out = s;
  const int i = 2 * mode;
  const int dim = 2 * s.n_modes;
  out.mean.segment<2>(i) = m * s.mean.segment<2>(i);
  out.cov.block(i, 0, 2, dim) = m * s.cov.block(i, 0, 2, dim);
  out.cov.block(0, i, dim, 2) = (out.cov.block(0, i, dim, 2) * m.transpose()).eval();
  return out;
}

/// Symplectic that scales the quadrature at angle theta by `a` and the
/// orthogonal one by 1/a: R(theta) diag(a, 1/a) R(theta)^T.
inline Eigen::Matrix2d quadrature_scaler(double a, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d rot, diag;
  rot << c, -s, s, c;
  diag << a, 0.0, 0.0, 1.0 / a;
  return rot * diag * rot.transpose();
}

}  // namespace detail

/// N-mode vacuum: zero mean, cov = I/2.
inline GaussianState vacuum(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("vacuum: n_modes must be >= 1");
  GaussianState s;
  s.n_modes = n_modes;
  s.mean = Eigen::VectorXd::Zero(2 * n_modes);
  s.cov = 0.5 * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  return s;
}

/// Squeezes the quadrature at angle theta: its variance shrinks by e^{-2r},
/// the orthogonal one grows by e^{+2r}. r must be non-negative; to squeeze
/// the orthogonal quadrature pass theta + pi/2.
inline GaussianState apply_squeezer(const GaussianState& s, int mode, double r,
                                    double theta) {
  detail::check_mode(s, mode, "apply_squeezer");
  if (r < 0.0)
    throw std::invalid_argument("apply_squeezer: r must be >= 0 (rotate theta instead)");
  return detail::apply_single_mode(s, mode, detail::quadrature_scaler(std::exp(-r), theta));
}

/// Two-mode beamsplitter with power transmissivity T and relative phase.
inline GaussianState apply_beamsplitter(const GaussianState& s, int mode_i,
                                        int mode_j, double transmissivity,
                                        double phase = 0.0) {
  detail::check_mode(s, mode_i, "apply_beamsplitter");
  detail::check_mode(s, mode_j, "apply_beamsplitter");
  if (mode_i == mode_j)
    throw std::invalid_argument("apply_beamsplitter: modes must be distinct");
  if (!(transmissivity >= 0.0 && transmissivity <= 1.0))
    throw std::invalid_argument("apply_beamsplitter: transmissivity must be in [0, 1]");

  const double t = std::sqrt(transmissivity);
  const double rcoef = std::sqrt(1.0 - transmissivity);
  const double c = std::cos(phase), sn = std::sin(phase);
  Eigen::Matrix2d rot_p, rot_m;
  rot_p << c, -sn, sn, c;     // annihilation-operator phase e^{+i phase}
  rot_m << c, sn, -sn, c;     // e^{-i phase}

  const int dim = 2 * s.n_modes;
  Eigen::MatrixXd big = Eigen::MatrixXd::Identity(dim, dim);
  const int a = 2 * mode_i, b = 2 * mode_j;
  big.block<2, 2>(a, a) = t * Eigen::Matrix2d::Identity();
  big.block<2, 2>(a, b) = rcoef * rot_p;
  big.block<2, 2>(b, a) = -rcoef * rot_m;
  big.block<2, 2>(b, b) = t * Eigen::Matrix2d::Identity();

  GaussianState out = s;
  out.mean = big * s.mean;
  out.cov = big * s.cov * big.transpose();
  return out;
}

/// Pure-loss channel on one mode: cov block -> eta*cov + (1-eta)/2 * I,
/// mean -> sqrt(eta)*mean, cross blocks scale by sqrt(eta).
inline GaussianState apply_loss(const GaussianState& s, int mode, double eta) {
  detail::check_mode(s, mode, "apply_loss");
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("apply_loss: eta must be in [0, 1]");
  const double root = std::sqrt(eta);
  GaussianState out = detail::apply_single_mode(s, mode, root * Eigen::Matrix2d::Identity());
  out.cov.block<2, 2>(2 * mode, 2 * mode) += (1.0 - eta) * 0.5 * Eigen::Matrix2d::Identity();
  return out;
}

/// Phase-sensitive amplifier: intrinsic loss eta_opa followed by gain G on
/// the quadrature at `phase` (variance x G) and 1/G on the orthogonal one.
/// The loss is placed before the gain stage; that ordering is what makes the
/// explicit chain reproduce the closed-form measurement efficiency.
inline GaussianState apply_psa(const GaussianState& s, int mode, const PsaParams& p) {
  detail::check_mode(s, mode, "apply_psa");
  p.validate();
  GaussianState out = apply_loss(s, mode, p.eta_opa);
  return detail::apply_single_mode(out, mode,
                                   detail::quadrature_scaler(std::sqrt(p.gain), p.phase));
}

/// Variance of the quadrature at angle theta in the given mode.
inline double quadrature_variance(const GaussianState& s, int mode, double theta) {
  detail::check_mode(s, mode, "quadrature_variance");
  const double c = std::cos(theta), sn = std::sin(theta);
  const auto blk = s.cov.block<2, 2>(2 * mode, 2 * mode);
  return c * c * blk(0, 0) + 2.0 * c * sn * blk(0, 1) + sn * sn * blk(1, 1);
}

/// Variance of an arbitrary linear combination c . (x1,p1,...,xN,pN).
inline double combo_variance(const GaussianState& s, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != s.cov.rows())
    throw std::invalid_argument("combo_variance: coefficient length mismatch");
  if (coeffs.isZero(0.0))
    throw std::invalid_argument("combo_variance: coefficients must not all be zero");
  return coeffs.dot(s.cov * coeffs);
}

/// Effective measurement efficiency of a PSA-boosted homodyne detector:
/// eta_meas = eta_opa * eta_hd / (eta_hd + (1 - eta_hd)/G). "0 dB gain"
/// means G = 1 linear.
inline double eta_meas_closed_form(double gain, double eta_opa, double eta_hd) {
  if (!(gain >= 1.0))
    throw std::invalid_argument("eta_meas_closed_form: gain must be >= 1 (linear)");
  if (!(eta_opa >= 0.0 && eta_opa <= 1.0) || !(eta_hd >= 0.0 && eta_hd <= 1.0))
    throw std::invalid_argument("eta_meas_closed_form: efficiencies must be in [0, 1]");
  return eta_opa * eta_hd / (eta_hd + (1.0 - eta_hd) / gain);
}

inline double eta_total(double eta_state, double eta_meas) {
  if (!(eta_state >= 0.0 && eta_state <= 1.0) || !(eta_meas >= 0.0 && eta_meas <= 1.0))
    throw std::invalid_argument("eta_total: efficiencies must be in [0, 1]");
  return eta_state * eta_meas;
}

/// Duan inseparability sum Var((x_i - x_j)/sqrt2) + Var((p_i + p_j)/sqrt2).
/// Separable states give >= 1; two vacua give exactly 1.
inline double duan_sum(const GaussianState& s, int mode_i, int mode_j) {
  detail::check_mode(s, mode_i, "duan_sum");
  detail::check_mode(s, mode_j, "duan_sum");
  if (mode_i == mode_j) throw std::invalid_argument("duan_sum: modes must be distinct");
  const double inv_sqrt2 = std::sqrt(0.5);
  Eigen::VectorXd cx = Eigen::VectorXd::Zero(2 * s.n_modes);
  Eigen::VectorXd cp = Eigen::VectorXd::Zero(2 * s.n_modes);
  cx(2 * mode_i) = inv_sqrt2;
  cx(2 * mode_j) = -inv_sqrt2;
  cp(2 * mode_i + 1) = inv_sqrt2;
  cp(2 * mode_j + 1) = inv_sqrt2;
  return combo_variance(s, cx) + combo_variance(s, cp);
}

/// Two-mode squeezed (EPR) state: x-squeezed and p-squeezed vacua of equal r
/// interfered on a balanced beamsplitter. x-quadratures come out correlated,
/// p-quadratures anti-correlated, and duan_sum = e^{-2r}.
inline GaussianState epr_state(double r) {
  GaussianState s = vacuum(2);
  s = apply_squeezer(s, 0, r, 0.0);
  s = apply_squeezer(s, 1, r, std::numbers::pi / 2.0);
  return apply_beamsplitter(s, 0, 1, 0.5);
}

/// Smallest eigenvalue of cov + (i/2) Omega; >= 0 (up to round-off) for any
/// physical state. Exposed for invariant checks.
inline double min_uncertainty_eigenvalue(const GaussianState& s) {
  Eigen::MatrixXcd m = s.cov.cast<std::complex<double>>();
  const std::complex<double> ih(0.0, 0.5);
  for (int k = 0; k < s.n_modes; ++k) {
    m(2 * k, 2 * k + 1) += ih;
    m(2 * k + 1, 2 * k) -= ih;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("min_uncertainty_eigenvalue: eigensolver failed");
  return solver.eigenvalues().minCoeff();
}

}  // namespace eprsim
