#include <sstream>

#include "buridan/csv_io.hpp"
#include "buridan/error.hpp"
#include "doctest.h"

using namespace buridan;

TEST_CASE("trajectory CSV round trip is exact") {
  const auto line = simulate_line(TauMatrix::two_state(0.05, 0.08), 0.1, 0.5, 500, 3);
  std::stringstream ss;
  write_trajectory_csv(ss, line);
  const std::string text = ss.str();
  CHECK(text.rfind("t,x,state\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 502);

  const SeriesData back = read_series_csv(ss);
  CHECK(back.times == line.times);
  CHECK(back.positions == line.positions);
  REQUIRE(back.states);
  CHECK(*back.states == line.states);

  Eigen::MatrixXd t(3, 3);
  t << 0, 0.01, 0.02, 0.03, 0, 0.01, 0.02, 0.02, 0;
  const auto tri = simulate_polygon(TauMatrix(t), PolygonTargets::unit_triangle(), 0.05, Eigen::Vector2d(0.2, 0.3),
                                    300, 8);
  std::stringstream s2;
  write_trajectory_csv(s2, tri);
  CHECK(s2.str().rfind("t,x,y,state\n", 0) == 0);
  const SeriesData b2 = read_series_csv(s2);
  CHECK(b2.positions == tri.positions);
  CHECK(*b2.states == tri.states);
}

TEST_CASE("observation CSV has no state column") {
  const auto tr = simulate_line(TauMatrix::two_state(0.1, 0.1), 0.2, 0.3, 50, 1);
  const auto obs = add_noise(tr, 0.01, 1);
  std::stringstream ss;
  write_observations_csv(ss, obs);
  CHECK(ss.str().rfind("t,x\n", 0) == 0);
  const SeriesData back = read_series_csv(ss);
  CHECK_FALSE(back.states);
  CHECK(back.positions == obs.positions);
  CHECK(back.observations().times == obs.times);
}

TEST_CASE("reals are written with 17 significant digits") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.0) == "1");
  CHECK(std::stod(format_real(0.45241870901797976)) == 0.45241870901797976);
}

TEST_CASE("malformed series files are I/O errors") {
  auto kind_of = [](const std::string& text) {
    std::stringstream ss(text);
    try {
      read_series_csv(ss);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Internal;
  };
  CHECK(kind_of("") == ErrorKind::Io);
  CHECK(kind_of("time,x\n0,1\n") == ErrorKind::Io);
  CHECK(kind_of("t,x\n0,abc\n") == ErrorKind::Io);
  CHECK(kind_of("t,x\n0,1,2\n") == ErrorKind::Io);
  CHECK(kind_of("t,x,z\n0,1,2\n") == ErrorKind::Io);
  CHECK_THROWS_AS(read_series_csv(std::string("/nonexistent/file.csv")), Error);
}
