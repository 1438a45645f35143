#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "buridan/error.hpp"
#include "buridan/geometry.hpp"
#include "buridan/hybrid_sim.hpp"
#include "buridan/report.hpp"
#include "buridan/state_sequence.hpp"

namespace buridan {

/// Uniformly sampled scalar series.
struct Signal1D {
  Eigen::VectorXd values;
  double dt = 1.0;

  Signal1D() = default;
  explicit Signal1D(Eigen::VectorXd v, double spacing = 1.0) : values(std::move(v)), dt(spacing) {
    require(values.size() >= 2, ErrorKind::InvalidParameters, "a signal needs at least two samples");
    require(values.allFinite(), ErrorKind::InvalidParameters, "signal values must be finite");
    require(dt > 0.0, ErrorKind::InvalidParameters, "sample spacing must be positive");
  }
  Eigen::Index size() const { return values.size(); }
};

// ---------------------------------------------------------------------------
// Windowed regression detector

/// For each start j, fits a least-squares line to every coordinate over
/// samples j..min(j + W, last) and picks the target best aligned with the
/// fitted direction, measured from the window centroid. W = 1 reduces to the
/// two-point detector on noiseless data.
StateSequence regression_state_detect(const Eigen::Ref<const Eigen::MatrixXd>& positions,
                                      const PolygonTargets& targets, int window);

// ---------------------------------------------------------------------------
// LWPR

struct LwprConfig {
  double h = 0.005;  // window as a fraction of the series length
  int degree = 2;
};

/// Tricube-weighted local polynomial fit over the ceil(h N) nearest samples
/// (window shifted, not shrunk, at the ends).
Signal1D lwpr_smooth(const Signal1D& signal, const LwprConfig& config = {});

// ---------------------------------------------------------------------------
// Wavelet

struct WaveletConfig {
  int levels = 6;
  double threshold_scale = 1.0;  // multiplies the universal threshold; 0 disables shrinkage
};

/// sym8 decomposition filter (16 taps).
const std::array<double, 16>& sym8_lowpass();
const std::array<double, 16>& sym8_highpass();

/// Periodized multilevel decomposition: {cA_L, cD_L, ..., cD_1}. Odd
/// lengths are extended by repeating the last sample.
std::vector<Eigen::VectorXd> wavelet_decompose(const Eigen::Ref<const Eigen::VectorXd>& x, int levels);
/// Inverse of wavelet_decompose, truncated to `length` samples.
Eigen::VectorXd wavelet_reconstruct(const std::vector<Eigen::VectorXd>& coeffs, Eigen::Index length);

/// Largest usable level: floor(log2(N / 15)) for the 16-tap filter.
int wavelet_max_level(Eigen::Index length);

/// Soft-thresholds every detail level with sigma sqrt(2 ln N),
/// sigma = median(|cD_1|) / 0.6745.
Signal1D wavelet_denoise(const Signal1D& signal, const WaveletConfig& config = {});

// ---------------------------------------------------------------------------
// Butterworth

struct ButterworthConfig {
  int order = 5;
  double cutoff_bins = 100.0;
  Eigen::Index n_samples = 0;  // 0: use the signal length
};

/// One biquad: b0 + b1 z^-1 + b2 z^-2 over 1 + a1 z^-1 + a2 z^-2.
struct SecondOrderSection {
  std::array<double, 3> b{};
  std::array<double, 3> a{1.0, 0.0, 0.0};
};

/// Digital lowpass at `cutoff` (fraction of Nyquist, in (0, 1)); every
/// section is scaled to unit DC gain.
std::vector<SecondOrderSection> butterworth_design(int order, double cutoff);

/// Poles of each section (one or two per section).
std::vector<std::complex<double>> section_poles(const SecondOrderSection& s);

/// Causal cascade, transposed direct form II, state primed with the first sample.
Eigen::VectorXd sos_filter(const std::vector<SecondOrderSection>& sections, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Cutoff cutoff_bins / (n_samples / 2) of Nyquist.
Signal1D butterworth_lowpass(const Signal1D& signal, const ButterworthConfig& config = {});

// ---------------------------------------------------------------------------
// Total variation (Split Bregman)

struct TVConfig {
  double gamma = 0.5;
  double lambda = 20.0;
  int n_iters = 10;
  /// Solve with (gamma I + D^T D) instead of (gamma I + lambda D^T D).
  bool unweighted_system = false;
};

/// sign(x) max(|x| - delta, 0).
template <class Scalar>
Scalar shrink(Scalar x, Scalar delta) {
  using std::abs;
  const Scalar m = abs(x) - delta;
  if (!(m > Scalar(0))) return Scalar(0);
  return x > Scalar(0) ? m : -m;
}

/// D x with a zero first row: (D x)_0 = 0, (D x)_k = x_k - x_{k-1}.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> forward_difference(const Eigen::MatrixBase<Derived>& x) {
  using Vector = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = x.size();
  Vector d = Vector::Zero(n);
  if (n > 1) d.tail(n - 1) = x.tail(n - 1) - x.head(n - 1);
  return d;
}

/// D^T y for the same operator (y_0 is ignored).
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> difference_adjoint(const Eigen::MatrixBase<Derived>& y) {
  using Vector = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = y.size();
  Vector g = Vector::Zero(n);
  if (n > 1) {
    g.tail(n - 1) += y.tail(n - 1);
    g.head(n - 1) -= y.tail(n - 1);
  }
  return g;
}

/// Thomas algorithm for a tridiagonal system; sub[0] and super[n-1] are unused.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve_tridiagonal(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& sub,
                                                           const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
                                                           const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& super,
                                                           Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs) {
  const Eigen::Index n = diag.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c(n);
  Scalar denom = diag[0];
  require(denom != Scalar(0), ErrorKind::Domain, "singular tridiagonal system");
  c[0] = super[0] / denom;
  rhs[0] /= denom;
  for (Eigen::Index k = 1; k < n; ++k) {
    denom = diag[k] - sub[k] * c[k - 1];
    require(denom != Scalar(0), ErrorKind::Domain, "singular tridiagonal system");
    c[k] = k + 1 < n ? super[k] / denom : Scalar(0);
    rhs[k] = (rhs[k] - sub[k] * rhs[k - 1]) / denom;
  }
  for (Eigen::Index k = n - 2; k >= 0; --k) rhs[k] -= c[k] * rhs[k + 1];
  return rhs;
}

/// (gamma / 2) |xhat - x|^2 + |D xhat|_1.
template <class D1, class D2>
typename D1::Scalar tv_objective(const Eigen::MatrixBase<D1>& xhat, const Eigen::MatrixBase<D2>& x,
                                 typename D1::Scalar gamma) {
  return gamma / 2 * (xhat - x).squaredNorm() + forward_difference(xhat).template lpNorm<1>();
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tv_denoise(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                                                    const TVConfig& config) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  require(config.gamma > 0 && config.lambda > 0 && config.n_iters >= 1, ErrorKind::InvalidParameters,
          "TV needs gamma > 0, lambda > 0 and at least one iteration");
  const Eigen::Index n = x.size();
  const Scalar gamma(config.gamma), lambda(config.lambda);
  const Scalar w = config.unweighted_system ? Scalar(1) : lambda;

  // gamma I + w D^T D; D^T D has diagonal (1, 2, ..., 2, 1) and -1 off the diagonal.
  Vector diag = Vector::Constant(n, gamma + 2 * w);
  diag[0] = gamma + w;
  diag[n - 1] = gamma + w;
  const Vector off = Vector::Constant(n, -w);

  Vector d = Vector::Zero(n), b = Vector::Zero(n), xhat = x;
  for (int it = 0; it < config.n_iters; ++it) {
    xhat = solve_tridiagonal<Scalar>(off, diag, off, Vector(lambda * difference_adjoint(d - b) + gamma * x));
    const Vector grad = forward_difference(xhat);
    for (Eigen::Index k = 0; k < n; ++k) d[k] = shrink<Scalar>(grad[k] + b[k], Scalar(1) / lambda);
    b += grad - d;
  }
  return xhat;
}

Signal1D tv_denoise(const Signal1D& signal, const TVConfig& config = {});

// ---------------------------------------------------------------------------

/// |F(w)|, w = 0..N-1, for F(w) = sum_k x_k exp(-2 pi i w k / N).
Eigen::VectorXd dft_magnitude(const Signal1D& signal);

// ---------------------------------------------------------------------------
// Pipeline

enum class Denoiser { None, Regression, Lwpr, Wavelet, Butterworth, Tv };

std::string to_string(Denoiser d);
Denoiser parse_denoiser(const std::string& name);

struct DenoiseConfig {
  Denoiser method = Denoiser::None;
  int window = 1;  // regression detector only
  LwprConfig lwpr;
  WaveletConfig wavelet;
  ButterworthConfig butterworth;
  TVConfig tv;
};

/// Applies the configured smoother to each coordinate independently. None
/// and Regression return the input unchanged.
Eigen::MatrixXd denoise_positions(const Eigen::Ref<const Eigen::MatrixXd>& positions, const DenoiseConfig& config);

/// Denoise, detect states, count switches. Relative errors are filled when
/// a reference is given.
EstimationReport denoise_and_estimate(const ObservationSeries& obs, const PolygonTargets& targets,
                                      const DenoiseConfig& config, const std::optional<ParamMap>& reference = {});

}  // namespace buridan
