#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "buridan/denoise.hpp"
#include "buridan/estimators.hpp"
#include "buridan/geometry.hpp"
#include "buridan/hybrid_sim.hpp"
#include "json.hpp"

namespace buridan::cli {

enum class Model { Line, Triangle, Polygon, Poisson };

std::string to_string(Model m);
Model parse_model(const std::string& name);

struct EstimatorConfig {
  EstimationMethod method = EstimationMethod::StateDetection;
  DenoiseConfig denoise;
  GridSpec grid;
};

/// One experiment: a model, its parameters, and what to do with the
/// simulated paths.
///
/// JSON schema (every key optional except `model` and `params`):
///   model        "line" | "triangle" | "polygon" | "poisson"
///   params       {"ij": value}; tau(i, j) for the discrete models, mean
///                waiting time mu(i, j) for poisson. "i,j" is also accepted.
///   vertices     [[x, y], ...]; polygon and poisson, default unit triangle
///   v            speed, default 0.1
///   n_steps      default 10000
///   x0           number (line) or [x, y]; defaults 0.5 / centroid
///   noise_sigma  default 0
///   seeds        default [1]
///   horizon      poisson only, default n_steps
///   sample_dt    poisson only, default 1
///   estimator    {"method": ..., "denoise": {"method": ..., "window",
///                 "lwpr": {"h", "degree"}, "wavelet": {"levels", "threshold_scale"},
///                 "butterworth": {"order", "cutoff_bins"},
///                 "tv": {"gamma", "lambda", "n_iters"}},
///                 "grid": {"lo", "hi", "points", "tolerance"}}
///   output_dir   default "out"
struct ExperimentConfig {
  Model model = Model::Line;
  Eigen::MatrixXd params;  // tau or mu, diagonal unused
  std::optional<Eigen::MatrixXd> vertices;
  double v = 0.1;
  std::int64_t n_steps = 10000;
  std::optional<Eigen::VectorXd> x0;
  double noise_sigma = 0.0;
  std::vector<std::uint64_t> seeds{1};
  std::optional<double> horizon;
  double sample_dt = 1.0;
  EstimatorConfig estimator;
  std::string output_dir = "out";

  int n_states() const { return static_cast<int>(params.rows()); }
  PolygonTargets targets() const;
  Eigen::VectorXd start() const;
};

/// Throws Error(Config) on any schema or consistency problem.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Canonical echo of a parsed config; stable key order and all defaults
/// filled in, so it fully determines a run.
nlohmann::json to_json(const ExperimentConfig& c);

/// Parses "1,2,5" into seeds.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Simulates one replicate of the configured model.
Trajectory simulate(const ExperimentConfig& c, std::uint64_t seed);

/// Simulated observations for one replicate: the clean path when
/// noise_sigma is 0, otherwise a noisy copy seeded with the same seed.
ObservationSeries observe(const ExperimentConfig& c, const Trajectory& tr, std::uint64_t seed);

}  // namespace buridan::cli
