#include "buridan/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "buridan/error.hpp"
#include "buridan/feature_stats.hpp"

namespace buridan {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_open_mean(double mu) {
  require(std::isfinite(mu), ErrorKind::Domain, "mean must be finite");
  require(mu != 0.0 && mu != 1.0, ErrorKind::Domain, "mean of 0 or 1 makes the inversion divide by zero");
  require(mu > 0.0 && mu < 1.0, ErrorKind::Domain, "mean must lie in (0, 1)");
}

void flag_range(TauPair& p) {
  auto check = [&](const char* name, double tau) {
    if (tau > 0.0 && tau <= 1.0) return;
    std::ostringstream os;
    os << name << " = " << tau << " lies outside (0, 1]";
    p.warnings.push_back(os.str());
  };
  check("tau01", p.tau01);
  check("tau10", p.tau10);
}

}  // namespace

TauPair invert_mean_frequency(double mu, double omega) {
  require_open_mean(mu);
  require(omega > 0.0, ErrorKind::Domain, "transition frequency must be positive");
  TauPair p{omega / (1.0 - mu), omega / mu, {}};
  flag_range(p);
  return p;
}

TauPair invert_mean_variance(double mu, double sigma2, double v) {
  require_open_mean(mu);
  require(v > 0.0, ErrorKind::Domain, "speed v must be positive");
  require(sigma2 > 0.0, ErrorKind::InfeasibleMoments, "variance must be positive");
  require(sigma2 < mu * (1.0 - mu), ErrorKind::InfeasibleMoments,
          "variance at or above mu (1 - mu) is impossible for a beta density");
  TauPair p;
  p.tau01 = mu * mu * v * (1.0 - mu) / sigma2 - mu * v;
  p.tau10 = v * (mu - 1.0) * (mu * mu - mu + sigma2) / sigma2;
  flag_range(p);
  return p;
}

TauPair invert_mean_power(double mu, double S, double v) {
  require_open_mean(mu);
  require(v > 0.0, ErrorKind::Domain, "speed v must be positive");
  require(S > 0.0, ErrorKind::Domain, "power slope must be positive");
  const double v4 = v * v * v * v;
  const double den01 = v4 * (mu - mu * mu) - S;
  const double den10 = mu * mu * v4 - mu * v4 + S;
  require(den01 != 0.0 && den10 != 0.0, ErrorKind::InfeasibleMoments, "power-slope inversion has a zero denominator");
  TauPair p{mu * S * v / den01, S * v * (mu - 1.0) / den10, {}};
  flag_range(p);
  return p;
}

double invert_mean_power_tau01_unscaled(double mu, double S, double v) {
  const double v4 = v * v * v * v;
  return mu * S * v / (v4 * (mu - mu * mu - S));
}

EstimationReport couplet_estimate(EstimationMethod method, const Eigen::Ref<const Eigen::VectorXd>& times,
                                  const Eigen::Ref<const Eigen::VectorXd>& positions, double v) {
  const MomentSummary m = empirical_moments(positions);
  TauPair p;
  switch (method) {
    case EstimationMethod::MeanFrequency:
      p = invert_mean_frequency(m.mean, directed_transition_frequency(detect_states_line(positions), 0, 1));
      break;
    case EstimationMethod::MeanVariance:
      p = invert_mean_variance(m.mean, m.variance, v);
      break;
    case EstimationMethod::MeanPower: {
      const auto states = detect_states_line(positions);
      p = invert_mean_power(m.mean, fitted_power_slope(cumulative_power(times, positions, states.states, v)), v);
      break;
    }
    default:
      fail(ErrorKind::Config, to_string(method) + " is not a couplet method");
  }
  EstimationReport r;
  r.method = method;
  r.estimates = {{{0, 1}, p.tau01}, {{1, 0}, p.tau10}};
  r.warnings = std::move(p.warnings);
  r.metadata["mean"] = m.mean;
  r.metadata["variance"] = m.variance;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

// Sufficient statistics of the beta likelihood.
struct BetaStats {
  double sum_log_x = 0.0;
  double sum_log_1mx = 0.0;
  double n = 0.0;

  double nll(double a, double b) const {
    return -((a - 1.0) * sum_log_x + (b - 1.0) * sum_log_1mx - n * log_beta_function(a, b));
  }
};

// Plain Nelder-Mead on a 2-D box; points outside evaluate to +inf.
template <class F>
Eigen::Vector2d nelder_mead(F f, Eigen::Vector2d start, double step, double tol, int max_iter) {
  std::array<Eigen::Vector2d, 3> x = {start, start + Eigen::Vector2d(step, 0.0), start + Eigen::Vector2d(0.0, step)};
  std::array<double, 3> fx = {f(x[0]), f(x[1]), f(x[2])};
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    const int best = order[0], mid = order[1], worst = order[2];
    const double size = std::max((x[mid] - x[best]).cwiseAbs().maxCoeff(), (x[worst] - x[best]).cwiseAbs().maxCoeff());
    if (size < tol) break;

    const Eigen::Vector2d centroid = 0.5 * (x[best] + x[mid]);
    const Eigen::Vector2d xr = centroid + (centroid - x[worst]);
    const double fr = f(xr);
    if (fr < fx[best]) {
      const Eigen::Vector2d xe = centroid + 2.0 * (centroid - x[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        x[worst] = xe, fx[worst] = fe;
      } else {
        x[worst] = xr, fx[worst] = fr;
      }
    } else if (fr < fx[mid]) {
      x[worst] = xr, fx[worst] = fr;
    } else {
      const bool outside = fr < fx[worst];
      const Eigen::Vector2d xc = outside ? Eigen::Vector2d(centroid + 0.5 * (xr - centroid))
                                         : Eigen::Vector2d(centroid + 0.5 * (x[worst] - centroid));
      const double fc = f(xc);
      if (fc < (outside ? fr : fx[worst])) {
        x[worst] = xc, fx[worst] = fc;
      } else {
        for (int k : {mid, worst}) {
          x[k] = x[best] + 0.5 * (x[k] - x[best]);
          fx[k] = f(x[k]);
        }
      }
    }
  }
  const auto best = std::min_element(fx.begin(), fx.end()) - fx.begin();
  return x[static_cast<std::size_t>(best)];
}

}  // namespace

double negative_log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& positions, double tau01, double tau10,
                               double v) {
  require(tau01 > 0.0 && tau10 > 0.0, ErrorKind::Domain, "switching probabilities must be positive");
  require(v > 0.0, ErrorKind::Domain, "speed v must be positive");
  const double a = tau01 / v, b = tau10 / v;
  double total = 0.0;
  for (Eigen::Index k = 0; k < positions.size(); ++k) total -= log_beta_density(positions[k], a, b);
  return total;
}

EstimationReport mle_estimate(const Eigen::Ref<const Eigen::VectorXd>& positions, double v, const GridSpec& search) {
  require(v > 0.0, ErrorKind::Domain, "speed v must be positive");
  require(search.lo > 0.0 && search.hi > search.lo && search.points >= 2 && search.tolerance > 0.0,
          ErrorKind::InvalidParameters, "invalid MLE search grid");

  BetaStats stats;
  std::size_t excluded = 0;
  for (Eigen::Index k = 0; k < positions.size(); ++k) {
    const double x = positions[k];
    if (!(x > 0.0 && x < 1.0)) {
      ++excluded;
      continue;
    }
    stats.sum_log_x += std::log(x);
    stats.sum_log_1mx += std::log1p(-x);
    stats.n += 1.0;
  }
  require(stats.n >= 2.0, ErrorKind::Domain, "fewer than two positions inside (0, 1)");

  auto objective = [&](const Eigen::Vector2d& tau) {
    if (!(tau[0] >= search.lo && tau[0] <= search.hi && tau[1] >= search.lo && tau[1] <= search.hi))
      return std::numeric_limits<double>::infinity();
    return stats.nll(tau[0] / v, tau[1] / v);
  };

  const Eigen::VectorXd axis =
      Eigen::VectorXd::LinSpaced(search.points, std::log(search.lo), std::log(search.hi)).array().exp();
  Eigen::Vector2d best(axis[0], axis[0]);
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < search.points; ++i)
    for (int j = 0; j < search.points; ++j) {
      const Eigen::Vector2d tau(axis[i], axis[j]);
      const double value = objective(tau);
      if (value < best_value) best_value = value, best = tau;
    }

  const double step = 0.25 * best.minCoeff();
  Eigen::Vector2d tau = nelder_mead(objective, best, step, search.tolerance, 5000);
  // A restart guards against a simplex that collapsed before reaching the optimum.
  tau = nelder_mead(objective, tau, 0.1 * tau.minCoeff(), search.tolerance, 5000);

  EstimationReport r;
  r.method = EstimationMethod::Mle;
  r.estimates = {{{0, 1}, tau[0]}, {{1, 0}, tau[1]}};
  r.metadata["excluded_samples"] = excluded;
  r.metadata["used_samples"] = static_cast<std::size_t>(stats.n);
  r.metadata["nll"] = objective(tau);
  if (excluded > 0)
    r.warnings.push_back(std::to_string(excluded) + " samples outside (0, 1) excluded from the likelihood");
  const double edge = 10.0 * search.tolerance;
  for (int c = 0; c < 2; ++c)
    if (tau[c] - search.lo < edge || search.hi - tau[c] < edge) {
      r.warnings.push_back("likelihood minimum lies on the search boundary");
      break;
    }
  return r;
}

// ---------------------------------------------------------------------------

StateSequence detect_states_line(const Eigen::Ref<const Eigen::VectorXd>& positions) {
  require(positions.size() >= 2, ErrorKind::InvalidParameters, "state detection needs at least two positions");
  const auto n = static_cast<std::size_t>(positions.size());
  std::vector<int> s(n);
  int prev = 0;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const double dx = positions[static_cast<Eigen::Index>(t + 1)] - positions[static_cast<Eigen::Index>(t)];
    if (dx > 0.0)
      prev = 1;
    else if (dx < 0.0)
      prev = 0;
    s[t] = prev;
  }
  s[n - 1] = s[n - 2];
  return StateSequence(std::move(s), 2);
}

int best_aligned_target(const Eigen::Ref<const Eigen::VectorXd>& from,
                        const Eigen::Ref<const Eigen::VectorXd>& direction, const PolygonTargets& targets) {
  const double a_norm = direction.norm();
  if (a_norm == 0.0) return -1;
  int best = -1;
  double best_cos = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < targets.size(); ++i) {
    const Eigen::VectorXd b = targets.vertex(i) - from;
    const double b_norm = b.norm();
    if (b_norm == 0.0) continue;
    const double c = direction.dot(b) / (a_norm * b_norm);
    if (c > best_cos) best_cos = c, best = i;
  }
  return best;
}

StateSequence detect_states_polygon(const Eigen::Ref<const Eigen::MatrixXd>& positions,
                                    const PolygonTargets& targets) {
  require(positions.rows() >= 2, ErrorKind::InvalidParameters, "state detection needs at least two positions");
  require(positions.cols() == targets.dim(), ErrorKind::InvalidParameters,
          "positions and targets have different dimensions");
  const auto n = static_cast<std::size_t>(positions.rows());
  std::vector<int> s(n);
  int prev = 0;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const auto r = static_cast<Eigen::Index>(t);
    const Eigen::VectorXd p = positions.row(r).transpose();
    const Eigen::VectorXd a = (positions.row(r + 1) - positions.row(r)).transpose();
    const int i = best_aligned_target(p, a, targets);
    if (i >= 0) prev = i;
    s[t] = prev;
  }
  s[n - 1] = s[n - 2];
  return StateSequence(std::move(s), targets.size());
}

// ---------------------------------------------------------------------------

ParamMap TauEstimate::to_params() const {
  ParamMap out;
  for (int i = 0; i < n_states(); ++i)
    for (int j = 0; j < n_states(); ++j)
      if (i != j) out[{i, j}] = tau(i, j);
  return out;
}

TauEstimate estimate_taus_from_states(const StateSequence& states) {
  require(states.size() >= 2, ErrorKind::InvalidParameters, "need at least two states");
  const int n = states.n_states;
  TauEstimate e;
  e.occupancy = Eigen::VectorXi::Zero(n);
  e.transitions = Eigen::MatrixXi::Zero(n, n);
  for (std::size_t t = 0; t + 1 < states.size(); ++t) {
    ++e.occupancy[states[t]];
    ++e.transitions(states[t], states[t + 1]);
  }
  e.tau = Eigen::MatrixXd::Constant(n, n, kNaN);
  for (int i = 0; i < n; ++i) {
    if (e.occupancy[i] == 0) continue;
    for (int j = 0; j < n; ++j) e.tau(i, j) = static_cast<double>(e.transitions(i, j)) / e.occupancy[i];
  }
  return e;
}

EstimationReport state_detection_report(const TauEstimate& est) {
  EstimationReport r;
  r.method = EstimationMethod::StateDetection;
  r.estimates = est.to_params();
  for (int i = 0; i < est.n_states(); ++i)
    if (est.missing(i)) r.warnings.push_back("state " + std::to_string(i) + " never observed; its row is missing");
  r.metadata["occupancy"] = std::vector<int>(est.occupancy.data(), est.occupancy.data() + est.occupancy.size());
  return r;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<double>> holding_times(const StateSequence& states,
                                               const Eigen::Ref<const Eigen::VectorXd>& times) {
  require(times.size() == static_cast<Eigen::Index>(states.size()), ErrorKind::InvalidParameters,
          "states and times differ in length");
  std::vector<std::vector<double>> out(static_cast<std::size_t>(states.n_states));
  std::size_t run_start = 0;
  for (std::size_t t = 1; t < states.size(); ++t) {
    if (states[t] == states[t - 1]) continue;
    out[static_cast<std::size_t>(states[run_start])].push_back(times[static_cast<Eigen::Index>(t)] -
                                                               times[static_cast<Eigen::Index>(run_start)]);
    run_start = t;
  }
  return out;
}

ParamMap PoissonEstimate::to_params() const {
  ParamMap out;
  for (int i = 0; i < n_states(); ++i)
    for (int j = 0; j < n_states(); ++j)
      if (i != j) out[{i, j}] = mu(i, j);
  return out;
}

PoissonEstimate estimate_poisson_params(const StateSequence& states, const Eigen::Ref<const Eigen::VectorXd>& times) {
  require(states.size() >= 2, ErrorKind::InvalidParameters, "need at least two states");
  const int n = states.n_states;
  const auto held = holding_times(states, times);
  PoissonEstimate e;
  e.exits = Eigen::VectorXi::Zero(n);
  e.jumps = Eigen::MatrixXi::Zero(n, n);
  for (std::size_t t = 1; t < states.size(); ++t)
    if (states[t] != states[t - 1]) {
      ++e.exits[states[t - 1]];
      ++e.jumps(states[t - 1], states[t]);
    }
  e.mean_holding = Eigen::VectorXd::Constant(n, kNaN);
  e.jump_probability = Eigen::MatrixXd::Constant(n, n, kNaN);
  e.mu = Eigen::MatrixXd::Constant(n, n, kNaN);
  for (int i = 0; i < n; ++i) {
    if (e.exits[i] == 0) continue;
    const auto& h = held[static_cast<std::size_t>(i)];
    double sum = 0.0;
    for (double d : h) sum += d;
    e.mean_holding[i] = sum / static_cast<double>(h.size());
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      e.jump_probability(i, j) = static_cast<double>(e.jumps(i, j)) / e.exits[i];
      if (e.jumps(i, j) > 0) e.mu(i, j) = e.mean_holding[i] / e.jump_probability(i, j);
    }
  }
  return e;
}

PoissonEstimate estimate_poisson_params(const std::vector<SwitchEvent>& events, int n_states) {
  std::vector<int> s;
  Eigen::VectorXd t(static_cast<Eigen::Index>(events.size()));
  s.reserve(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) {
    s.push_back(events[k].state);
    t[static_cast<Eigen::Index>(k)] = events[k].time;
  }
  return estimate_poisson_params(StateSequence(std::move(s), n_states), t);
}

EstimationReport poisson_report(const PoissonEstimate& est) {
  EstimationReport r;
  r.method = EstimationMethod::Poisson;
  r.estimates = est.to_params();
  for (int i = 0; i < est.n_states(); ++i)
    for (int j = 0; j < est.n_states(); ++j)
      if (i != j && std::isnan(est.mu(i, j)))
        r.warnings.push_back("no observed jump " + std::to_string(i) + " -> " + std::to_string(j));
  return r;
}

}  // namespace buridan
