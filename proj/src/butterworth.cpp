#include <cmath>
#include <complex>
#include <numbers>

#include "buridan/denoise.hpp"

namespace buridan {

namespace {

using cd = std::complex<double>;

// Scale b so that B(1) = A(1).
void normalize_dc(SecondOrderSection& s) {
  const double a1 = s.a[0] + s.a[1] + s.a[2];
  const double b1 = s.b[0] + s.b[1] + s.b[2];
  for (double& c : s.b) c *= a1 / b1;
}

}  // namespace

std::vector<SecondOrderSection> butterworth_design(int order, double cutoff) {
  require(order >= 1, ErrorKind::InvalidParameters, "filter order must be positive");
  require(cutoff > 0.0 && cutoff < 1.0, ErrorKind::InvalidParameters,
          "cutoff must lie strictly between 0 and the Nyquist frequency");
  // Bilinear transform with sample rate 2 (Nyquist = 1); pre-warp the cutoff.
  const double fs2 = 4.0;
  const double warped = fs2 * std::tan(std::numbers::pi * cutoff / 2.0);

  std::vector<SecondOrderSection> sections;
  auto to_z = [&](cd p) { return (fs2 + p) / (fs2 - p); };
  if (order % 2) {
    // Real pole at s = -warped.
    SecondOrderSection s;
    const double z = to_z(cd(-warped, 0.0)).real();
    s.b = {1.0, 1.0, 0.0};
    s.a = {1.0, -z, 0.0};
    normalize_dc(s);
    sections.push_back(s);
  }
  for (int k = 0; k < order / 2; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order);
    const cd z = to_z(warped * std::polar(1.0, theta));
    SecondOrderSection s;
    s.b = {1.0, 2.0, 1.0};
    s.a = {1.0, -2.0 * z.real(), std::norm(z)};
    normalize_dc(s);
    sections.push_back(s);
  }
  return sections;
}

std::vector<std::complex<double>> section_poles(const SecondOrderSection& s) {
  if (s.a[2] == 0.0) return {cd(-s.a[1], 0.0)};
  const cd disc = std::sqrt(cd(s.a[1] * s.a[1] - 4.0 * s.a[2], 0.0));
  return {(-s.a[1] + disc) / 2.0, (-s.a[1] - disc) / 2.0};
}

Eigen::VectorXd sos_filter(const std::vector<SecondOrderSection>& sections,
                           const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd y = x;
  if (y.size() == 0) return y;
  for (const auto& s : sections) {
    // Steady state for a constant input equal to the first sample.
    const double x0 = y[0];
    const double gain = (s.b[0] + s.b[1] + s.b[2]) / (s.a[0] + s.a[1] + s.a[2]);
    double z2 = (s.b[2] - s.a[2] * gain) * x0;
    double z1 = (s.b[1] - s.a[1] * gain) * x0 + z2;
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      const double in = y[k];
      const double out = s.b[0] * in + z1;
      z1 = s.b[1] * in - s.a[1] * out + z2;
      z2 = s.b[2] * in - s.a[2] * out;
      y[k] = out;
    }
  }
  return y;
}

Signal1D butterworth_lowpass(const Signal1D& signal, const ButterworthConfig& config) {
  const Eigen::Index n = config.n_samples > 0 ? config.n_samples : signal.size();
  require(config.cutoff_bins > 0.0, ErrorKind::InvalidParameters, "cutoff must be positive");
  require(config.cutoff_bins < static_cast<double>(n) / 2.0, ErrorKind::InvalidParameters,
          "cutoff must lie below the Nyquist bin n_samples / 2");
  const double fc = config.cutoff_bins / (static_cast<double>(n) / 2.0);
  return Signal1D(sos_filter(butterworth_design(config.order, fc), signal.values), signal.dt);
}

}  // namespace buridan
