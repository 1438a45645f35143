#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "buridan/hybrid_sim.hpp"
#include "buridan/state_sequence.hpp"

namespace buridan {

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;  // population (divide-by-n) form
  std::size_t n_samples = 0;
};

/// Cumulative power F sampled at `times`; F(times[0]) = 0.
struct PowerSeries {
  Eigen::VectorXd times;
  Eigen::VectorXd values;
};

MomentSummary empirical_moments(const Eigen::Ref<const Eigen::VectorXd>& positions);

/// Stationary mean and variance of the line model's beta position density.
MomentSummary predicted_moments(double tau01, double tau10, double v);

/// Fraction of steps t -> t+1 on which the state changes (any direction).
double transition_frequency(const StateSequence& states);

/// Fraction of steps on which the state goes from `from` to `to`. For the
/// two-state chain, from=0, to=1 estimates omega = tau01 tau10 / (tau01 + tau10).
double directed_transition_frequency(const StateSequence& states, int from, int to);

/// omega = tau01 tau10 / (tau01 + tau10).
double predicted_frequency(double tau01, double tau10);

/// Integral of (x'')^2 between switches, evaluated in closed form per sample
/// interval. Within an interval of length dt in state 0 starting at x the
/// contribution is v^3 x^2 (1 - e^{-2 v dt}) / 2; state 1 uses 1 - x.
PowerSeries cumulative_power(const Eigen::Ref<const Eigen::VectorXd>& times,
                             const Eigen::Ref<const Eigen::VectorXd>& positions, const std::vector<int>& states,
                             double v);
PowerSeries cumulative_power(const Trajectory& traj);

/// Average growth rate of F: v^4 tau01 tau10 / ((tau01 + tau10)(tau01 + tau10 + v)).
double predicted_power_slope(double tau01, double tau10, double v);

/// Least-squares slope of F against time.
double fitted_power_slope(const PowerSeries& power);

/// ln B(a, b).
double log_beta_function(double a, double b);

/// Log density of Beta(a, b) at x in (0, 1).
double log_beta_density(double x, double a, double b);

}  // namespace buridan
