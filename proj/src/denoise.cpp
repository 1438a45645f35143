#include "buridan/denoise.hpp"

#include <cmath>
#include <complex>
#include <unsupported/Eigen/FFT>

#include "buridan/estimators.hpp"

namespace buridan {

StateSequence regression_state_detect(const Eigen::Ref<const Eigen::MatrixXd>& positions,
                                      const PolygonTargets& targets, int window) {
  require(window >= 1, ErrorKind::InvalidParameters, "regression window must be at least 1");
  require(positions.rows() >= 2, ErrorKind::InvalidParameters, "state detection needs at least two positions");
  require(positions.cols() == targets.dim(), ErrorKind::InvalidParameters,
          "positions and targets have different dimensions");
  const Eigen::Index n = positions.rows();
  std::vector<int> s(static_cast<std::size_t>(n));
  int prev = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index count = std::min<Eigen::Index>(window + 1, n - j);
    if (count >= 2) {
      const auto block = positions.middleRows(j, count);
      const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(count, 0.0, static_cast<double>(count - 1));
      const Eigen::VectorXd tc = t.array() - t.mean();
      const Eigen::RowVectorXd centroid = block.colwise().mean();
      // Least-squares slope of each coordinate against the sample index.
      const Eigen::VectorXd slope = ((block.rowwise() - centroid).transpose() * tc) / tc.squaredNorm();
      const int i = best_aligned_target(centroid.transpose(), slope, targets);
      if (i >= 0) prev = i;
    }
    s[static_cast<std::size_t>(j)] = prev;
  }
  return StateSequence(std::move(s), targets.size());
}

Signal1D lwpr_smooth(const Signal1D& signal, const LwprConfig& config) {
  require(config.h > 0.0 && config.h <= 1.0, ErrorKind::InvalidParameters, "LWPR span h must lie in (0, 1]");
  require(config.degree >= 0, ErrorKind::InvalidParameters, "LWPR degree must be nonnegative");
  const Eigen::Index n = signal.size();
  const auto q = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(std::ceil(config.h * static_cast<double>(n))));
  require(q >= config.degree + 1, ErrorKind::InvalidParameters,
          "LWPR window ceil(h N) is too small for the polynomial degree");
  const int p = config.degree + 1;

  Eigen::VectorXd out(n);
  Eigen::MatrixXd design(q, p);
  Eigen::VectorXd w(q);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index start = std::clamp<Eigen::Index>(k - q / 2, 0, n - q);
    const double d_max = static_cast<double>(std::max(k - start, start + q - 1 - k)) + 1.0;
    for (Eigen::Index r = 0; r < q; ++r) {
      const double d = static_cast<double>(start + r - k);
      const double u = std::abs(d) / d_max;
      const double c = 1.0 - u * u * u;
      w[r] = std::sqrt(c * c * c);
      double pw = 1.0;
      for (int c2 = 0; c2 < p; ++c2, pw *= d) design(r, c2) = w[r] * pw;
    }
    const Eigen::VectorXd rhs = w.cwiseProduct(signal.values.segment(start, q));
    // Centred at sample k, so the fitted value there is the intercept.
    out[k] = design.colPivHouseholderQr().solve(rhs)[0];
  }
  return Signal1D(std::move(out), signal.dt);
}

Signal1D tv_denoise(const Signal1D& signal, const TVConfig& config) {
  return Signal1D(tv_denoise<double>(signal.values, config), signal.dt);
}

Eigen::VectorXd dft_magnitude(const Signal1D& signal) {
  Eigen::FFT<double> fft;
  std::vector<double> in(signal.values.data(), signal.values.data() + signal.size());
  std::vector<std::complex<double>> spectrum;
  fft.ClearFlag(Eigen::FFT<double>::HalfSpectrum);
  fft.fwd(spectrum, in);
  Eigen::VectorXd mag(signal.size());
  for (Eigen::Index k = 0; k < signal.size(); ++k) mag[k] = std::abs(spectrum[static_cast<std::size_t>(k)]);
  return mag;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::pair<Denoiser, const char*> kDenoiserNames[] = {
    {Denoiser::None, "none"},       {Denoiser::Regression, "regression"},   {Denoiser::Lwpr, "lwpr"},
    {Denoiser::Wavelet, "wavelet"}, {Denoiser::Butterworth, "butterworth"}, {Denoiser::Tv, "tv"},
};

}  // namespace

std::string to_string(Denoiser d) {
  for (const auto& [m, name] : kDenoiserNames)
    if (m == d) return name;
  fail(ErrorKind::Internal, "unknown denoiser");
}

Denoiser parse_denoiser(const std::string& name) {
  for (const auto& [m, n] : kDenoiserNames)
    if (name == n) return m;
  fail(ErrorKind::Config, "unknown denoiser '" + name + "'");
}

Eigen::MatrixXd denoise_positions(const Eigen::Ref<const Eigen::MatrixXd>& positions, const DenoiseConfig& config) {
  Eigen::MatrixXd out = positions;
  for (Eigen::Index c = 0; c < positions.cols(); ++c) {
    const Signal1D s(positions.col(c));
    switch (config.method) {
      case Denoiser::None:
      case Denoiser::Regression:
        break;
      case Denoiser::Lwpr:
        out.col(c) = lwpr_smooth(s, config.lwpr).values;
        break;
      case Denoiser::Wavelet:
        out.col(c) = wavelet_denoise(s, config.wavelet).values;
        break;
      case Denoiser::Butterworth:
        out.col(c) = butterworth_lowpass(s, config.butterworth).values;
        break;
      case Denoiser::Tv:
        out.col(c) = tv_denoise(s, config.tv).values;
        break;
    }
  }
  return out;
}

EstimationReport denoise_and_estimate(const ObservationSeries& obs, const PolygonTargets& targets,
                                      const DenoiseConfig& config, const std::optional<ParamMap>& reference) {
  const StateSequence states = config.method == Denoiser::Regression
                                   ? regression_state_detect(obs.positions, targets, config.window)
                                   : detect_states_polygon(denoise_positions(obs.positions, config), targets);
  EstimationReport r = state_detection_report(estimate_taus_from_states(states));
  r.metadata["denoiser"] = to_string(config.method);
  if (config.method == Denoiser::Regression) r.metadata["window"] = config.window;
  if (reference) r.attach_reference(*reference);
  return r;
}

}  // namespace buridan
