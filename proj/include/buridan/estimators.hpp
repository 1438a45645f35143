#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "buridan/geometry.hpp"
#include "buridan/hybrid_sim.hpp"
#include "buridan/report.hpp"
#include "buridan/state_sequence.hpp"

namespace buridan {

// ---------------------------------------------------------------------------
// Couplet inversions for the two-state line model

struct TauPair {
  double tau01 = 0.0;
  double tau10 = 0.0;
  std::vector<std::string> warnings;  // set when a result falls outside (0, 1]
};

/// tau01 = omega / (1 - mu), tau10 = omega / mu.
TauPair invert_mean_frequency(double mu, double omega);

/// Inverts the stationary mean and variance; sigma2 must be below mu (1 - mu).
TauPair invert_mean_variance(double mu, double sigma2, double v);

/// Inverts the mean and the cumulative power slope S:
///   tau01 = mu S v / (v^4 (mu - mu^2) - S),  tau10 = S v (mu - 1) / (mu^2 v^4 - mu v^4 + S).
TauPair invert_mean_power(double mu, double S, double v);

/// tau01 with the denominator v^4 (mu - mu^2 - S). Kept only to document that
/// this form does not invert the power slope; use invert_mean_power.
double invert_mean_power_tau01_unscaled(double mu, double S, double v);

/// Estimate from an observed line series: the moments come from the
/// positions, omega and F from sign-detected states. `method` must be one of
/// the three couplet methods.
EstimationReport couplet_estimate(EstimationMethod method, const Eigen::Ref<const Eigen::VectorXd>& times,
                                  const Eigen::Ref<const Eigen::VectorXd>& positions, double v);

// ---------------------------------------------------------------------------
// Beta likelihood

/// -sum_k ln Beta(x_k; tau01 / v, tau10 / v). Every x_k must lie in (0, 1).
double negative_log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& positions, double tau01, double tau10,
                               double v);

struct GridSpec {
  double lo = 1e-4;
  double hi = 0.5;
  int points = 40;          // per axis, log-spaced
  double tolerance = 1e-6;  // simplex size at which refinement stops
};

/// Grid search followed by Nelder-Mead refinement inside [lo, hi]^2.
/// Samples outside (0, 1) are dropped and counted in
/// metadata["excluded_samples"]; the report warns when the optimum sits on
/// the search boundary.
EstimationReport mle_estimate(const Eigen::Ref<const Eigen::VectorXd>& positions, double v,
                              const GridSpec& search = {});

// ---------------------------------------------------------------------------
// State detection

/// state[t] = 1 when x[t+1] > x[t], 0 when it decreases; ties carry the
/// previous state (0 at t = 0). The last entry repeats the one before it.
StateSequence detect_states_line(const Eigen::Ref<const Eigen::VectorXd>& positions);

/// state[t] = argmax_i cos(p[t+1] - p[t], g_i - p[t]), lowest index on ties.
/// Zero displacement carries the previous state. Rows of `positions` are samples.
StateSequence detect_states_polygon(const Eigen::Ref<const Eigen::MatrixXd>& positions,
                                    const PolygonTargets& targets);

/// Index of the target whose direction from `from` best matches `direction`,
/// or -1 when the direction is zero.
int best_aligned_target(const Eigen::Ref<const Eigen::VectorXd>& from,
                        const Eigen::Ref<const Eigen::VectorXd>& direction, const PolygonTargets& targets);

// ---------------------------------------------------------------------------
// Empirical switching probabilities

struct TauEstimate {
  Eigen::MatrixXd tau;          // NaN rows for states never occupied before the last sample
  Eigen::VectorXi occupancy;    // # of t < last with states[t] = i
  Eigen::MatrixXi transitions;  // # of t with states[t] = i, states[t+1] = j

  int n_states() const { return static_cast<int>(tau.rows()); }
  double at(int i, int j) const { return tau(i, j); }
  bool missing(int i) const { return occupancy[i] == 0; }
  /// Off-diagonal entries keyed (i, j).
  ParamMap to_params() const;
};

TauEstimate estimate_taus_from_states(const StateSequence& states);

EstimationReport state_detection_report(const TauEstimate& est);

// ---------------------------------------------------------------------------
// Poisson competing-clock model

struct PoissonEstimate {
  Eigen::VectorXd mean_holding;  // mu_i, NaN without a completed visit
  Eigen::MatrixXd jump_probability;
  Eigen::MatrixXd mu;            // mu_i / p_ij; NaN where unobserved
  Eigen::VectorXi exits;
  Eigen::MatrixXi jumps;

  int n_states() const { return static_cast<int>(mu.rows()); }
  ParamMap to_params() const;
};

/// Completed holding times per state. A run of equal consecutive labels
/// starting at times[a] lasts until the start of the next run; the final
/// run is censored and dropped.
std::vector<std::vector<double>> holding_times(const StateSequence& states,
                                               const Eigen::Ref<const Eigen::VectorXd>& times);

/// Works both on a sampled sequence and on an exact event record (one
/// entry per entered state).
PoissonEstimate estimate_poisson_params(const StateSequence& states, const Eigen::Ref<const Eigen::VectorXd>& times);

/// Convenience overload for a simulated event record.
PoissonEstimate estimate_poisson_params(const std::vector<SwitchEvent>& events, int n_states);

EstimationReport poisson_report(const PoissonEstimate& est);

}  // namespace buridan
