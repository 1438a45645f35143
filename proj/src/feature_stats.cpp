#include "buridan/feature_stats.hpp"

#include <cmath>

#include "buridan/error.hpp"

namespace buridan {

namespace {

void require_pair_sum(double tau01, double tau10) {
  require(tau01 >= 0.0 && tau10 >= 0.0, ErrorKind::InvalidParameters, "switching probabilities must be nonnegative");
  require(tau01 + tau10 > 0.0, ErrorKind::DegenerateChain, "tau01 + tau10 must be positive");
}

}  // namespace

MomentSummary empirical_moments(const Eigen::Ref<const Eigen::VectorXd>& positions) {
  require(positions.size() >= 2, ErrorKind::InvalidParameters, "moments need at least two samples");
  MomentSummary m;
  m.n_samples = static_cast<std::size_t>(positions.size());
  m.mean = positions.mean();
  m.variance = (positions.array() - m.mean).square().mean();
  return m;
}

MomentSummary predicted_moments(double tau01, double tau10, double v) {
  require_pair_sum(tau01, tau10);
  require(v > 0.0, ErrorKind::InvalidParameters, "speed v must be positive");
  const double s = tau01 + tau10;
  MomentSummary m;
  m.mean = tau01 / s;
  m.variance = tau01 * tau10 / (s * s * (tau01 / v + tau10 / v + 1.0));
  return m;
}

double transition_frequency(const StateSequence& states) {
  require(states.size() >= 2, ErrorKind::InvalidParameters, "frequency needs at least two states");
  std::size_t changes = 0;
  for (std::size_t t = 0; t + 1 < states.size(); ++t) changes += states[t] != states[t + 1];
  return static_cast<double>(changes) / static_cast<double>(states.size() - 1);
}

double directed_transition_frequency(const StateSequence& states, int from, int to) {
  require(states.size() >= 2, ErrorKind::InvalidParameters, "frequency needs at least two states");
  std::size_t hits = 0;
  for (std::size_t t = 0; t + 1 < states.size(); ++t) hits += states[t] == from && states[t + 1] == to;
  return static_cast<double>(hits) / static_cast<double>(states.size() - 1);
}

double predicted_frequency(double tau01, double tau10) {
  require_pair_sum(tau01, tau10);
  return tau01 * tau10 / (tau01 + tau10);
}

PowerSeries cumulative_power(const Eigen::Ref<const Eigen::VectorXd>& times,
                             const Eigen::Ref<const Eigen::VectorXd>& positions, const std::vector<int>& states,
                             double v) {
  require(v > 0.0, ErrorKind::InvalidParameters, "speed v must be positive");
  require(times.size() == positions.size(), ErrorKind::InvalidParameters, "times and positions differ in length");
  require(states.size() == static_cast<std::size_t>(positions.size()), ErrorKind::InvalidParameters,
          "cumulative power needs a state label for every sample");
  PowerSeries out{times, Eigen::VectorXd::Zero(positions.size())};
  const double v3 = v * v * v;
  double f = 0.0;
  for (Eigen::Index t = 0; t + 1 < positions.size(); ++t) {
    const int s = states[static_cast<std::size_t>(t)];
    require(s == 0 || s == 1, ErrorKind::InvalidParameters, "cumulative power is defined for the two-state line");
    const double dt = times[t + 1] - times[t];
    const double gap = s == 0 ? positions[t] : 1.0 - positions[t];
    f += v3 * gap * gap * (-std::expm1(-2.0 * v * dt)) / 2.0;
    out.values[t + 1] = f;
  }
  return out;
}

PowerSeries cumulative_power(const Trajectory& traj) {
  require(traj.dim() == 1, ErrorKind::InvalidParameters, "cumulative power is defined for 1-D trajectories");
  return cumulative_power(traj.times, traj.positions.col(0), traj.states, traj.speed);
}

double predicted_power_slope(double tau01, double tau10, double v) {
  require_pair_sum(tau01, tau10);
  require(v > 0.0, ErrorKind::InvalidParameters, "speed v must be positive");
  const double s = tau01 + tau10;
  return v * v * v * v * tau01 * tau10 / (s * (s + v));
}

double fitted_power_slope(const PowerSeries& power) {
  require(power.times.size() >= 2, ErrorKind::InvalidParameters, "slope needs at least two samples");
  const Eigen::ArrayXd t = power.times.array() - power.times.mean();
  const Eigen::ArrayXd f = power.values.array() - power.values.mean();
  return (t * f).sum() / t.square().sum();
}

double log_beta_function(double a, double b) {
  require(a > 0.0 && b > 0.0, ErrorKind::Domain, "beta parameters must be positive");
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double log_beta_density(double x, double a, double b) {
  require(x > 0.0 && x < 1.0, ErrorKind::Domain, "beta density is evaluated on the open interval (0, 1)");
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_function(a, b);
}

}  // namespace buridan
