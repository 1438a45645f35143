#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "buridan/hybrid_sim.hpp"

namespace buridan {

// Series CSV: header `t,x[,y][,state]`, one row per sample, reals printed
// with 17 significant digits so they round-trip exactly.

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_observations_csv(std::ostream& os, const ObservationSeries& obs);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_observations_csv(const std::string& path, const ObservationSeries& obs);

/// Either CSV flavour read back; `states` is set when the file has a state column.
struct SeriesData {
  Eigen::VectorXd times;
  Eigen::MatrixXd positions;
  std::optional<std::vector<int>> states;

  ObservationSeries observations() const { return {times, positions}; }
};

SeriesData read_series_csv(std::istream& is);
SeriesData read_series_csv(const std::string& path);

/// "%.17g" formatting used by every writer.
std::string format_real(double x);

}  // namespace buridan
