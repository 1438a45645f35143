#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "buridan/geometry.hpp"
#include "buridan/markov_core.hpp"
#include "buridan/state_sequence.hpp"

namespace buridan {

enum class SwitchingModel { DiscreteMarkov, Poisson };

struct SwitchEvent {
  double time;
  int state;  // state entered at `time`
};

/// Sampled path of the switching system with its latent states.
///
/// Row t of `positions` is the position at times[t]; states[t] is the
/// state driving the motion out of that sample. For the discrete model the
/// times are 0, 1, ..., n_steps.
struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd positions;
  std::vector<int> states;
  int n_states = 2;
  double speed = 0.0;
  SwitchingModel model = SwitchingModel::DiscreteMarkov;
  /// Exact switching record (Poisson model only), starting with the
  /// initial state at t = 0.
  std::vector<SwitchEvent> events;

  Eigen::Index size() const { return positions.rows(); }
  int dim() const { return static_cast<int>(positions.cols()); }
  StateSequence state_sequence() const { return StateSequence(states, n_states); }
};

/// Positions only, as an estimator would see them.
struct ObservationSeries {
  Eigen::VectorXd times;
  Eigen::MatrixXd positions;

  Eigen::Index size() const { return positions.rows(); }
  int dim() const { return static_cast<int>(positions.cols()); }
};

/// Mean waiting times mu(i, j), i != j, of the competing-clock model.
class PoissonParams {
 public:
  /// Off-diagonal entries must be positive and finite; the diagonal is ignored.
  explicit PoissonParams(Eigen::MatrixXd mu);

  int n_states() const { return static_cast<int>(mu_.rows()); }
  double operator()(int i, int j) const { return mu_(i, j); }
  const Eigen::MatrixXd& values() const { return mu_; }

  /// Mean holding time in state i: (sum_j 1 / mu(i, j))^-1.
  double mean_holding_time(int i) const;
  /// Probability that the next jump out of i goes to j: mu_i / mu(i, j).
  double jump_probability(int i, int j) const;

 private:
  Eigen::MatrixXd mu_;
};

/// Donkey on the segment [0, 1] with per-step switching.
Trajectory simulate_line(const TauMatrix& tau, double v, double x0, std::int64_t n_steps, std::uint64_t seed,
                         int initial_state = 0);

/// Donkey in a convex pen; state i is attracted to vertex i.
///
/// Over each unit step the position follows the exact solution
/// p <- g + (p - g) e^{-v}; the switch draw for the next step follows the
/// move.
Trajectory simulate_polygon(const TauMatrix& tau, const PolygonTargets& targets, double v,
                            const Eigen::Ref<const Eigen::VectorXd>& p0, std::int64_t n_steps, std::uint64_t seed,
                            int initial_state = 0);

/// Event-driven competing exponential clocks, sampled on a uniform grid
/// 0, dt, 2 dt, ... <= horizon.
Trajectory simulate_poisson(const PoissonParams& params, const PolygonTargets& targets, double v,
                            const Eigen::Ref<const Eigen::VectorXd>& p0, double horizon, double sample_dt,
                            std::uint64_t seed, int initial_state = 0);

/// Adds i.i.d. N(0, sigma^2) to every coordinate of every sample.
ObservationSeries add_noise(const Trajectory& traj, double sigma, std::uint64_t seed);

/// Exact relaxation of `p` toward vertex `target`: g + (p - g) * decay,
/// where decay = e^{-v dt}.
///
/// If rounding would land exactly on the target the previous position is
/// kept, so a position never coincides with a vertex (on the line it stays
/// in the open interval). Near a vertex a point may still round onto an
/// adjacent edge; the motion direction is unaffected.
Eigen::VectorXd relax_toward(const PolygonTargets& targets, const Eigen::Ref<const Eigen::VectorXd>& p, int target,
                             double decay);

}  // namespace buridan
