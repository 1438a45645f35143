#include <algorithm>
#include <cmath>
#include <numeric>

#include "buridan/hybrid_sim.hpp"
#include "buridan/rng.hpp"
#include "doctest.h"

using namespace buridan;

namespace {

// Closed unit triangle up to rounding, excluding the vertices themselves.
bool in_unit_triangle(const Eigen::Vector2d& p) {
  const bool closed = p.x() >= 0.0 && p.y() >= 0.0 && p.x() + p.y() <= 1.0 + 1e-15;
  const auto tri = PolygonTargets::unit_triangle();
  for (int i = 0; i < 3; ++i)
    if (p == tri.vertex(i)) return false;
  return closed;
}

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  CHECK(x != d.next_u64());
  Rng u(1, 5);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double r = u.uniform();
    lo = std::min(lo, r), hi = std::max(hi, r), sum += r;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(sum / 100000 - 0.5) < 3 * std::sqrt(1.0 / 12 / 100000));
}

TEST_CASE("rng normal and exponential moments") {
  Rng r(9, 4);
  const int n = 200000;
  double s1 = 0, s2 = 0, e1 = 0;
  for (int k = 0; k < n; ++k) {
    const double z = r.normal();
    s1 += z, s2 += z * z;
    e1 += r.exponential(2.5);
  }
  CHECK(std::abs(s1 / n) < 3 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 3 * std::sqrt(2.0 / n));
  CHECK(std::abs(e1 / n - 2.5) < 3 * 2.5 / std::sqrt(n));
}

TEST_CASE("first line step is the exact exponential relaxation") {
  const auto tr = simulate_line(TauMatrix::two_state(0.05, 0.08), 0.1, 0.5, 1, 3);
  CHECK(tr.positions(1, 0) == doctest::Approx(0.45241870901797976).epsilon(1e-15));
  CHECK(tr.times[1] == 1.0);
  CHECK(tr.states.size() == 2);
}

TEST_CASE("line trajectory follows its latent states") {
  const double v = 0.1;
  const auto tr = simulate_line(TauMatrix::two_state(0.05, 0.08), v, 0.3, 5000, 17);
  REQUIRE(tr.size() == 5001);
  for (Eigen::Index t = 0; t + 1 < tr.size(); ++t) {
    const double x = tr.positions(t, 0), g = tr.states[static_cast<std::size_t>(t)];
    CHECK(tr.positions(t + 1, 0) == doctest::Approx(g + (x - g) * std::exp(-v)).epsilon(1e-14));
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("simulation is deterministic per seed") {
  const auto tau = TauMatrix::two_state(0.05, 0.08);
  const auto a = simulate_line(tau, 0.1, 0.5, 2000, 5);
  const auto b = simulate_line(tau, 0.1, 0.5, 2000, 5);
  const auto c = simulate_line(tau, 0.1, 0.5, 2000, 6);
  CHECK(a.positions == b.positions);
  CHECK(a.states == b.states);
  CHECK(a.states != c.states);
}

TEST_CASE("empirical switching probabilities match tau within three standard errors") {
  const double t01 = 0.05, t10 = 0.08;
  const auto tr = simulate_line(TauMatrix::two_state(t01, t10), 0.1, 0.5, 200000, 8);
  double n0 = 0, n1 = 0, s01 = 0, s10 = 0;
  for (std::size_t t = 0; t + 1 < tr.states.size(); ++t) {
    if (tr.states[t] == 0) ++n0, s01 += tr.states[t + 1] == 1;
    else ++n1, s10 += tr.states[t + 1] == 0;
  }
  CHECK(std::abs(s01 / n0 - t01) < 3 * std::sqrt(t01 * (1 - t01) / n0));
  CHECK(std::abs(s10 / n1 - t10) < 3 * std::sqrt(t10 * (1 - t10) / n1));
}

TEST_CASE("invalid simulation inputs") {
  const auto tau = TauMatrix::two_state(0.05, 0.08);
  CHECK_THROWS_AS(simulate_line(tau, 0.0, 0.5, 10, 1), Error);
  CHECK_THROWS_AS(simulate_line(tau, 0.1, 1.0, 10, 1), Error);
  CHECK_THROWS_AS(simulate_line(tau, 0.1, 0.5, -1, 1), Error);
  CHECK_THROWS_AS(simulate_line(tau, 0.1, 0.5, 10, 1, 2), Error);
  CHECK_THROWS_AS(simulate_line(TauMatrix(3), 0.1, 0.5, 10, 1), Error);
  Eigen::Vector2d outside(0.8, 0.8);
  CHECK_THROWS_AS(simulate_polygon(TauMatrix(3), PolygonTargets::unit_triangle(), 0.1, outside, 10, 1), Error);
}

TEST_CASE("zero steps returns the start") {
  const auto tr = simulate_line(TauMatrix::two_state(0.05, 0.08), 0.1, 0.25, 0, 1);
  CHECK(tr.size() == 1);
  CHECK(tr.positions(0, 0) == 0.25);
}

TEST_CASE("polygon targets validation") {
  Eigen::MatrixXd square(4, 2);
  square << 0, 0, 1, 0, 1, 1, 0, 1;
  CHECK_NOTHROW(PolygonTargets{square});
  Eigen::MatrixXd dented(4, 2);
  dented << 0, 0, 1, 0, 0.3, 0.3, 0, 1;
  CHECK_THROWS_AS(PolygonTargets{dented}, Error);
  Eigen::MatrixXd dup(3, 2);
  dup << 0, 0, 1, 0, 0, 0;
  CHECK_THROWS_AS(PolygonTargets{dup}, Error);
  Eigen::MatrixXd collinear(3, 2);
  collinear << 0, 0, 1, 0, 2, 0;
  CHECK_THROWS_AS(PolygonTargets{collinear}, Error);

  const auto tri = PolygonTargets::unit_triangle();
  CHECK(tri.strictly_inside(Eigen::Vector2d(0.2, 0.2)));
  CHECK_FALSE(tri.strictly_inside(Eigen::Vector2d(0.5, 0.5)));
  CHECK_FALSE(tri.strictly_inside(Eigen::Vector2d(0.0, 0.3)));
}

TEST_CASE("triangle trajectory moves toward the active vertex and stays in the pen") {
  Eigen::MatrixXd t(3, 3);
  t << 0, 0.01, 0.06, 0.02, 0, 0.03, 0.04, 0.05, 0;
  const auto tri = PolygonTargets::unit_triangle();
  const double v = 0.05;
  const auto tr = simulate_polygon(TauMatrix(t), tri, v, Eigen::Vector2d(1.0 / 3, 1.0 / 3), 3000, 4);
  for (Eigen::Index k = 0; k + 1 < tr.size(); ++k) {
    const Eigen::Vector2d p = tr.positions.row(k).transpose();
    const Eigen::Vector2d g = tri.vertex(tr.states[static_cast<std::size_t>(k)]);
    const Eigen::Vector2d expect = g + (p - g) * std::exp(-v);
    CHECK((tr.positions.row(k + 1).transpose() - expect).norm() < 1e-14);
    CHECK(in_unit_triangle(p));
  }
}

TEST_CASE("relaxation never lands on the target") {
  const auto line = PolygonTargets::line();
  Eigen::VectorXd p(1);
  p << 1.0 - 1e-16;
  const Eigen::VectorXd next = relax_toward(line, p, 1, std::exp(-0.1));
  CHECK(next[0] < 1.0);
  CHECK(next[0] >= p[0]);
  p << 1e-300;
  CHECK(relax_toward(line, p, 0, 1e-10)[0] > 0.0);

  // Sliding along the hypotenuse away from a vertex is not blocked by rounding.
  const auto tri = PolygonTargets::unit_triangle();
  Eigen::VectorXd q(2);
  q << 8.2382686292250788e-08, 0.99999991761731355;
  const Eigen::VectorXd moved = relax_toward(tri, q, 1, std::exp(-0.4));
  CHECK(moved[0] > 0.3);
}

TEST_CASE("noise stream is independent of the switching stream") {
  const auto tr = simulate_line(TauMatrix::two_state(0.05, 0.08), 0.1, 0.5, 20000, 3);
  const auto clean = add_noise(tr, 0.0, 3);
  CHECK(clean.positions == tr.positions);
  const auto noisy = add_noise(tr, 0.01, 3);
  const Eigen::VectorXd e = noisy.positions.col(0) - tr.positions.col(0);
  const double sd = std::sqrt(e.squaredNorm() / static_cast<double>(e.size()));
  CHECK(std::abs(sd - 0.01) < 3 * 0.01 / std::sqrt(2.0 * e.size()));
  CHECK(add_noise(tr, 0.01, 3).positions == noisy.positions);
  CHECK_THROWS_AS(add_noise(tr, -1.0, 3), Error);
}

TEST_CASE("poisson parameters") {
  Eigen::MatrixXd mu(3, 3);
  mu << 0, 10, 30, 20, 0, 20, 10, 30, 0;
  const PoissonParams p(mu);
  CHECK(p.mean_holding_time(0) == doctest::Approx(7.5));
  CHECK(p.jump_probability(0, 1) == doctest::Approx(0.75));
  CHECK(p.jump_probability(1, 0) == doctest::Approx(0.5));
  Eigen::MatrixXd bad = mu;
  bad(0, 1) = 0.0;
  CHECK_THROWS_AS(PoissonParams{bad}, Error);
}

TEST_CASE("poisson simulation: events, grid and jump frequencies") {
  Eigen::MatrixXd mu(3, 3);
  mu << 0, 10, 30, 20, 0, 20, 10, 30, 0;
  const PoissonParams params(mu);
  const auto tri = PolygonTargets::unit_triangle();
  const auto tr = simulate_poisson(params, tri, 0.05, Eigen::Vector2d(0.3, 0.3), 2e5, 1.0, 12);
  REQUIRE(tr.events.size() > 1000);
  CHECK(tr.size() == 200001);
  for (std::size_t k = 1; k < tr.events.size(); ++k) {
    CHECK(tr.events[k].time > tr.events[k - 1].time);
    CHECK(tr.events[k].state != tr.events[k - 1].state);
  }
  // Grid states agree with the event record.
  std::size_t e = 0;
  for (Eigen::Index k = 0; k < tr.size(); ++k) {
    while (e + 1 < tr.events.size() && tr.events[e + 1].time <= tr.times[k]) ++e;
    CHECK(tr.states[static_cast<std::size_t>(k)] == tr.events[e].state);
    CHECK(in_unit_triangle(tr.positions.row(k).transpose()));
  }
  Eigen::MatrixXd jumps = Eigen::MatrixXd::Zero(3, 3);
  for (std::size_t k = 1; k < tr.events.size(); ++k) jumps(tr.events[k - 1].state, tr.events[k].state) += 1;
  for (int i = 0; i < 3; ++i) {
    const double exits = jumps.row(i).sum();
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const double p = params.jump_probability(i, j);
      CHECK(std::abs(jumps(i, j) / exits - p) < 3 * std::sqrt(p * (1 - p) / exits));
    }
  }
}

namespace {

// Classical RK4 on dp/dt = v (g - p) over one unit of time.
Eigen::VectorXd rk4_unit_step(const Eigen::VectorXd& p0, const Eigen::VectorXd& g, double v, int n) {
  const double h = 1.0 / n;
  auto f = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd { return v * (g - p); };
  Eigen::VectorXd p = p0;
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd k1 = f(p), k2 = f(p + 0.5 * h * k1), k3 = f(p + 0.5 * h * k2), k4 = f(p + h * k3);
    p += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return p;
}

}  // namespace

TEST_CASE("closed-form step agrees with numerical integration") {
  for (double v : {0.01, 0.1, 1.0}) {
    for (int s : {0, 1}) {
      const auto tr = simulate_line(TauMatrix::two_state(0.0, 0.0), v, 0.37, 1, 1, s);
      const auto ref = rk4_unit_step(Eigen::VectorXd::Constant(1, 0.37), Eigen::VectorXd::Constant(1, s), v, 2000);
      CHECK(std::abs(tr.positions(1, 0) - ref[0]) < 1e-12);
    }
    const auto tri = PolygonTargets::unit_triangle();
    const Eigen::Vector2d p0(0.2, 0.5);
    for (int s = 0; s < 3; ++s) {
      const auto tr = simulate_polygon(TauMatrix(3), tri, v, p0, 1, 1, s);
      const auto ref = rk4_unit_step(p0, tri.vertex(s), v, 2000);
      CHECK((tr.positions.row(1).transpose() - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("occupancy over a million steps matches the stationary vector") {
  const auto line_tau = TauMatrix::two_state(0.005, 0.008);
  const auto tr = simulate_line(line_tau, 0.1, 0.5, 1000000, 11);
  const auto pi = stationary_minor_determinant(build_transition_matrix(line_tau));
  const double occ0 = std::count(tr.states.begin(), tr.states.end(), 0) / static_cast<double>(tr.states.size());
  CHECK(std::abs(occ0 - pi[0]) < 0.01);

  Eigen::MatrixXd t(3, 3);
  t << 0, 1e-3, 6e-3, 2e-3, 0, 3e-3, 4e-3, 5e-3, 0;
  const auto tri = simulate_polygon(TauMatrix(t), PolygonTargets::unit_triangle(), 0.01,
                                    Eigen::Vector2d(1.0 / 3, 1.0 / 3), 1000000, 11);
  const auto pi3 = stationary_minor_determinant(build_transition_matrix(TauMatrix(t)));
  for (int i = 0; i < 3; ++i) {
    const double occ = std::count(tri.states.begin(), tri.states.end(), i) / static_cast<double>(tri.states.size());
    CHECK(std::abs(occ - pi3[i]) < 0.01);
  }
}

TEST_CASE("two-state poisson holding times are exponential with the given mean") {
  Eigen::MatrixXd mu(2, 2);
  mu << 0, 5, 8, 0;
  const auto tr = simulate_poisson(PoissonParams(mu), PolygonTargets::line(), 0.1, Eigen::VectorXd::Constant(1, 0.5),
                                   750000, 100.0, 21);
  REQUIRE(tr.events.size() > 100000);
  std::vector<double> hold[2];
  for (std::size_t k = 0; k + 1 < tr.events.size() && k < 100000; ++k)
    hold[tr.events[k].state].push_back(tr.events[k + 1].time - tr.events[k].time);
  for (int i = 0; i < 2; ++i) {
    const double mean = std::accumulate(hold[i].begin(), hold[i].end(), 0.0) / hold[i].size();
    CHECK(std::abs(mean - mu(i, 1 - i)) / mu(i, 1 - i) < 0.02);
  }
}

TEST_CASE("noise on each coordinate of a planar path") {
  Eigen::MatrixXd t(3, 3);
  t << 0, 0.01, 0.01, 0.01, 0, 0.01, 0.01, 0.01, 0;
  const auto tr = simulate_polygon(TauMatrix(t), PolygonTargets::unit_triangle(), 0.05, Eigen::Vector2d(0.3, 0.3),
                                   9999, 2);
  const auto obs = add_noise(tr, 0.01, 5);
  for (int c = 0; c < 2; ++c) {
    const Eigen::VectorXd e = obs.positions.col(c) - tr.positions.col(c);
    const double sd = std::sqrt((e.array() - e.mean()).square().sum() / (e.size() - 1));
    CHECK(std::abs(sd - 0.01) < 0.05 * 0.01);
  }
  const Eigen::VectorXd ex = obs.positions.col(0) - tr.positions.col(0);
  const Eigen::VectorXd ey = obs.positions.col(1) - tr.positions.col(1);
  CHECK(std::abs(ex.dot(ey)) / (ex.norm() * ey.norm()) < 0.05);
}
