#include "buridan/hybrid_sim.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "buridan/rng.hpp"

namespace buridan {

PoissonParams::PoissonParams(Eigen::MatrixXd mu) : mu_(std::move(mu)) {
  require(mu_.rows() == mu_.cols() && mu_.rows() >= 2, ErrorKind::InvalidParameters,
          "waiting-time matrix must be square with at least two states");
  for (Eigen::Index i = 0; i < mu_.rows(); ++i) {
    mu_(i, i) = 0.0;
    for (Eigen::Index j = 0; j < mu_.cols(); ++j) {
      if (i == j) continue;
      if (!(mu_(i, j) > 0.0 && std::isfinite(mu_(i, j)))) {
        std::ostringstream os;
        os << "mean waiting time mu(" << i << "," << j << ") = " << mu_(i, j) << " must be in (0, inf)";
        fail(ErrorKind::InvalidParameters, os.str());
      }
    }
  }
}

double PoissonParams::mean_holding_time(int i) const {
  double rate = 0.0;
  for (int j = 0; j < n_states(); ++j)
    if (j != i) rate += 1.0 / mu_(i, j);
  return 1.0 / rate;
}

double PoissonParams::jump_probability(int i, int j) const { return mean_holding_time(i) / mu_(i, j); }

Eigen::VectorXd relax_toward(const PolygonTargets& targets, const Eigen::Ref<const Eigen::VectorXd>& p, int target,
                             double decay) {
  const Eigen::VectorXd g = targets.vertex(target);
  Eigen::VectorXd next = g + (p - g) * decay;
  if (next == g) return p;
  return next;
}

namespace {

void check_common(const TauMatrix& tau, const PolygonTargets& targets, double v,
                  const Eigen::Ref<const Eigen::VectorXd>& p0, std::int64_t n_steps, int initial_state) {
  require(v > 0.0 && std::isfinite(v), ErrorKind::Domain, "speed v must be positive");
  require(n_steps >= 0, ErrorKind::Domain, "number of steps must be nonnegative");
  require(tau.n_states() == targets.size(), ErrorKind::InvalidParameters,
          "switching matrix and pen disagree on the number of states");
  require(initial_state >= 0 && initial_state < targets.size(), ErrorKind::Domain, "initial state out of range");
  require(targets.strictly_inside(p0), ErrorKind::Domain, "start position must be strictly inside the pen");
}

// Next state after one unit step from `state`.
int draw_switch(const TauMatrix& tau, int state, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (int j = 0; j < tau.n_states(); ++j) {
    if (j == state) continue;
    cumulative += tau(state, j);
    if (u < cumulative) return j;
  }
  return state;
}

}  // namespace

Trajectory simulate_polygon(const TauMatrix& tau, const PolygonTargets& targets, double v,
                            const Eigen::Ref<const Eigen::VectorXd>& p0, std::int64_t n_steps, std::uint64_t seed,
                            int initial_state) {
  check_common(tau, targets, v, p0, n_steps, initial_state);
  build_transition_matrix(tau);  // validates the per-state budgets

  Trajectory traj;
  traj.n_states = tau.n_states();
  traj.speed = v;
  traj.model = SwitchingModel::DiscreteMarkov;
  traj.times = Eigen::VectorXd::LinSpaced(n_steps + 1, 0.0, static_cast<double>(n_steps));
  traj.positions.resize(n_steps + 1, targets.dim());
  traj.states.resize(static_cast<std::size_t>(n_steps + 1));

  Rng rng(seed, Rng::kSwitchStream);
  const double decay = std::exp(-v);
  Eigen::VectorXd p = p0;
  int state = initial_state;
  traj.positions.row(0) = p.transpose();
  traj.states[0] = state;
  for (std::int64_t t = 0; t < n_steps; ++t) {
    p = relax_toward(targets, p, state, decay);
    state = draw_switch(tau, state, rng);
    traj.positions.row(t + 1) = p.transpose();
    traj.states[static_cast<std::size_t>(t + 1)] = state;
  }
  return traj;
}

Trajectory simulate_line(const TauMatrix& tau, double v, double x0, std::int64_t n_steps, std::uint64_t seed,
                         int initial_state) {
  require(tau.n_states() == 2, ErrorKind::InvalidParameters, "the line model has two states");
  require(x0 > 0.0 && x0 < 1.0, ErrorKind::Domain, "start position must lie in (0, 1)");
  Eigen::VectorXd p0(1);
  p0 << x0;
  return simulate_polygon(tau, PolygonTargets::line(), v, p0, n_steps, seed, initial_state);
}

Trajectory simulate_poisson(const PoissonParams& params, const PolygonTargets& targets, double v,
                            const Eigen::Ref<const Eigen::VectorXd>& p0, double horizon, double sample_dt,
                            std::uint64_t seed, int initial_state) {
  require(v > 0.0 && std::isfinite(v), ErrorKind::Domain, "speed v must be positive");
  require(horizon > 0.0 && std::isfinite(horizon), ErrorKind::Domain, "horizon must be positive");
  require(sample_dt > 0.0 && std::isfinite(sample_dt), ErrorKind::Domain, "sample spacing must be positive");
  require(params.n_states() == targets.size(), ErrorKind::InvalidParameters,
          "waiting-time matrix and pen disagree on the number of states");
  require(initial_state >= 0 && initial_state < targets.size(), ErrorKind::Domain, "initial state out of range");
  require(targets.strictly_inside(p0), ErrorKind::Domain, "start position must be strictly inside the pen");

  const int n = params.n_states();
  Rng rng(seed, Rng::kSwitchStream);

  int state = initial_state;
  double anchor_time = 0.0;
  Eigen::VectorXd anchor = p0;
  double next_jump_time = 0.0;
  int next_state = state;
  // One exponential clock per possible destination; the earliest wins.
  auto arm_clocks = [&]() {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == state) continue;
      const double dt = rng.exponential(params(state, j));
      if (dt < best) {
        best = dt;
        next_state = j;
      }
    }
    next_jump_time = anchor_time + best;
  };
  auto position_at = [&](double t) { return relax_toward(targets, anchor, state, std::exp(-v * (t - anchor_time))); };

  Trajectory traj;
  traj.n_states = n;
  traj.speed = v;
  traj.model = SwitchingModel::Poisson;
  traj.events.push_back({0.0, state});

  const auto n_samples = static_cast<Eigen::Index>(std::floor(horizon / sample_dt * (1.0 + 1e-12))) + 1;
  traj.times.resize(n_samples);
  traj.positions.resize(n_samples, targets.dim());
  traj.states.resize(static_cast<std::size_t>(n_samples));

  arm_clocks();
  auto advance_to = [&](double t) {
    while (next_jump_time <= t) {
      anchor = position_at(next_jump_time);
      anchor_time = next_jump_time;
      state = next_state;
      traj.events.push_back({anchor_time, state});
      arm_clocks();
    }
  };
  for (Eigen::Index k = 0; k < n_samples; ++k) {
    const double t = static_cast<double>(k) * sample_dt;
    advance_to(t);
    anchor = position_at(t);
    anchor_time = t;
    traj.times[k] = t;
    traj.positions.row(k) = anchor.transpose();
    traj.states[static_cast<std::size_t>(k)] = state;
  }
  advance_to(horizon);
  return traj;
}

ObservationSeries add_noise(const Trajectory& traj, double sigma, std::uint64_t seed) {
  require(sigma >= 0.0 && std::isfinite(sigma), ErrorKind::Domain, "noise level must be nonnegative");
  ObservationSeries obs{traj.times, traj.positions};
  if (sigma == 0.0) return obs;
  Rng rng(seed, Rng::kNoiseStream);
  for (Eigen::Index t = 0; t < obs.positions.rows(); ++t)
    for (Eigen::Index c = 0; c < obs.positions.cols(); ++c) obs.positions(t, c) += sigma * rng.normal();
  return obs;
}

}  // namespace buridan
