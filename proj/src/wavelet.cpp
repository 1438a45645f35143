#include <algorithm>
#include <cmath>

#include "buridan/denoise.hpp"

namespace buridan {

namespace {

constexpr std::array<double, 16> kSym8Lo = {
    -0.0033824159510061256, -0.0005421323317911481, 0.03169508781149298,  0.007607487324917605,
    -0.1432942383508097,    -0.061273359067658524,  0.4813596512583722,   0.7771857517005235,
    0.3644418948353314,     -0.05194583810770904,   -0.027219029917056003, 0.049137179673607506,
    0.003808752013890615,   -0.01495225833704823,   -0.0003029205147213668, 0.0018899503327594609,
};

constexpr std::array<double, 16> make_highpass(const std::array<double, 16>& lo) {
  std::array<double, 16> hi{};
  for (std::size_t j = 0; j < 16; ++j) hi[j] = (j % 2 ? 1.0 : -1.0) * lo[15 - j];
  return hi;
}

constexpr std::array<double, 16> kSym8Hi = make_highpass(kSym8Lo);
constexpr Eigen::Index kTaps = 16;
constexpr Eigen::Index kShift = kTaps / 2;

Eigen::Index wrap(Eigen::Index k, Eigen::Index n) {
  k %= n;
  return k < 0 ? k + n : k;
}

// One analysis step on an even-length signal.
void analyze(const Eigen::VectorXd& x, Eigen::VectorXd& approx, Eigen::VectorXd& detail) {
  const Eigen::Index n = x.size(), half = n / 2;
  approx.setZero(half);
  detail.setZero(half);
  for (Eigen::Index k = 0; k < half; ++k)
    for (Eigen::Index j = 0; j < kTaps; ++j) {
      const double xv = x[wrap(2 * k + kShift - j, n)];
      approx[k] += kSym8Lo[static_cast<std::size_t>(j)] * xv;
      detail[k] += kSym8Hi[static_cast<std::size_t>(j)] * xv;
    }
}

// Adjoint of analyze, which is its inverse for the orthonormal filter pair.
Eigen::VectorXd synthesize(const Eigen::VectorXd& approx, const Eigen::VectorXd& detail) {
  const Eigen::Index half = approx.size(), n = 2 * half;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < half; ++k)
    for (Eigen::Index j = 0; j < kTaps; ++j)
      x[wrap(2 * k + kShift - j, n)] +=
          kSym8Lo[static_cast<std::size_t>(j)] * approx[k] + kSym8Hi[static_cast<std::size_t>(j)] * detail[k];
  return x;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

}  // namespace

const std::array<double, 16>& sym8_lowpass() { return kSym8Lo; }
const std::array<double, 16>& sym8_highpass() { return kSym8Hi; }

int wavelet_max_level(Eigen::Index length) {
  if (length < kTaps - 1) return 0;
  return static_cast<int>(std::floor(std::log2(static_cast<double>(length) / static_cast<double>(kTaps - 1))));
}

std::vector<Eigen::VectorXd> wavelet_decompose(const Eigen::Ref<const Eigen::VectorXd>& x, int levels) {
  require(levels >= 1, ErrorKind::InvalidParameters, "wavelet levels must be at least 1");
  require(x.size() >= (Eigen::Index{1} << levels), ErrorKind::InvalidParameters,
          "signal shorter than 2^levels samples");
  require(levels <= wavelet_max_level(x.size()), ErrorKind::InvalidParameters,
          "too many wavelet levels: coarsest coefficients would be shorter than the filter");
  std::vector<Eigen::VectorXd> details;
  Eigen::VectorXd a = x;
  for (int l = 0; l < levels; ++l) {
    if (a.size() % 2) {
      a.conservativeResize(a.size() + 1);
      a[a.size() - 1] = a[a.size() - 2];
    }
    Eigen::VectorXd approx, detail;
    analyze(a, approx, detail);
    details.push_back(std::move(detail));
    a = std::move(approx);
  }
  std::vector<Eigen::VectorXd> out{a};
  out.insert(out.end(), details.rbegin(), details.rend());
  return out;
}

Eigen::VectorXd wavelet_reconstruct(const std::vector<Eigen::VectorXd>& coeffs, Eigen::Index length) {
  require(coeffs.size() >= 2, ErrorKind::InvalidParameters, "need approximation and at least one detail level");
  Eigen::VectorXd a = coeffs[0];
  for (std::size_t l = 1; l < coeffs.size(); ++l) {
    const Eigen::VectorXd& d = coeffs[l];
    if (a.size() == d.size() + 1) a.conservativeResize(d.size());  // drop the padding sample
    require(a.size() == d.size(), ErrorKind::InvalidParameters, "wavelet coefficient lengths do not match");
    a = synthesize(a, d);
  }
  require(a.size() >= length, ErrorKind::InvalidParameters, "reconstruction shorter than requested length");
  return a.head(length);
}

Signal1D wavelet_denoise(const Signal1D& signal, const WaveletConfig& config) {
  require(config.threshold_scale >= 0.0, ErrorKind::InvalidParameters, "threshold scale must be nonnegative");
  auto coeffs = wavelet_decompose(signal.values, config.levels);
  const Eigen::VectorXd& finest = coeffs.back();
  std::vector<double> mags(static_cast<std::size_t>(finest.size()));
  for (Eigen::Index k = 0; k < finest.size(); ++k) mags[static_cast<std::size_t>(k)] = std::abs(finest[k]);
  const double sigma = median(std::move(mags)) / 0.6745;
  const double thr =
      config.threshold_scale * sigma * std::sqrt(2.0 * std::log(static_cast<double>(signal.size())));
  if (thr > 0.0)
    for (std::size_t l = 1; l < coeffs.size(); ++l) coeffs[l] = coeffs[l].unaryExpr([thr](double c) {
      return shrink(c, thr);
    });
  return Signal1D(wavelet_reconstruct(coeffs, signal.size()), signal.dt);
}

}  // namespace buridan
