#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "buridan/csv_io.hpp"
#include "buridan/feature_stats.hpp"
#include "config.hpp"

#ifndef BURIDAN_VERSION
#define BURIDAN_VERSION "0.0.0"
#endif

namespace buridan::cli {

using nlohmann::json;
namespace fs = std::filesystem;

ExitCode exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidParameters:
    case ErrorKind::Domain:
    case ErrorKind::UnsupportedSize:
      return kConfigError;
    case ErrorKind::Io:
      return kIoError;
    case ErrorKind::DegenerateChain:
    case ErrorKind::NonConvergence:
    case ErrorKind::InfeasibleMoments:
    case ErrorKind::Internal:
      return kNumericalError;
  }
  return kNumericalError;
}

namespace {

// ---------------------------------------------------------------------------
// plumbing

// Runs f(0..n-1) on a fixed pool; results land at their own index, so the
// join order never depends on scheduling. The first failure by index is
// rethrown.
template <typename R>
std::vector<R> parallel_map(std::size_t n, const std::function<R(std::size_t)>& f) {
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < n;) {
      try {
        out[k] = f(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorKind::Io, "cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::Io, "cannot open for writing: " + path.string());
  os << text;
  if (!os) fail(ErrorKind::Io, "write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// Minimal CSV builder with the library's number formatting.
class Table {
 public:
  explicit Table(std::string header = "") : text_(std::move(header) + "\n") {}

  template <typename... Cells>
  void row(const Cells&... cells) {
    std::size_t k = 0;
    ((text_ += (k++ ? "," : "") + cell(cells)), ...);
    text_ += "\n";
  }
  void append(const Table& other) { text_ += other.text_.substr(other.text_.find('\n') + 1); }
  const std::string& text() const { return text_; }

 private:
  static std::string cell(double x) { return format_real(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <typename I>
    requires std::is_integral_v<I>
  static std::string cell(I i) {
    return std::to_string(i);
  }

  std::string text_;
};

json manifest(const std::string& command, json settings, const json& files) {
  return {{"tool", "buridan"}, {"version", BURIDAN_VERSION}, {"command", command}, {"config", std::move(settings)},
          {"files", files}};
}

std::string seed_stem(std::uint64_t seed) { return "seed_" + std::to_string(seed); }

ParamMap off_diagonal(const Eigen::MatrixXd& m) {
  ParamMap p;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (i != j) p[{i, j}] = m(i, j);
  return p;
}

json off_diagonal_json(const Eigen::MatrixXd& m) {
  json j = json::object();
  for (const auto& [k, v] : off_diagonal(m)) j[param_key_string(k)] = v;
  return j;
}

double quantile(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  const double h = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

json aggregate(const std::vector<EstimationReport>& reports) {
  std::map<ParamKey, std::vector<double>> values;
  for (const auto& r : reports)
    for (const auto& [k, v] : r.estimates)
      if (std::isfinite(v)) values[k].push_back(v);
  json params = json::object();
  for (const auto& [k, v] : values) {
    const double q1 = quantile(v, 0.25), q3 = quantile(v, 0.75);
    params[param_key_string(k)] = {
        {"median", quantile(v, 0.5)}, {"q1", q1}, {"q3", q3}, {"iqr", q3 - q1}, {"n_finite", v.size()}};
  }
  return {{"method", reports.empty() ? "" : to_string(reports.front().method)},
          {"n_reports", reports.size()},
          {"parameters", params}};
}

// ---------------------------------------------------------------------------
// estimation on one series

struct Series {
  std::string stem;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> input;
  ObservationSeries obs;
  std::optional<StateSequence> states;     // latent states when known
  std::optional<std::vector<SwitchEvent>> events;
};

bool is_line(const ExperimentConfig& c) { return c.targets().dim() == 1; }

EstimationReport estimate_series(const ExperimentConfig& c, const Series& s) {
  const EstimatorConfig& e = c.estimator;
  const PolygonTargets targets = c.targets();
  if (s.obs.dim() != targets.dim())
    fail(ErrorKind::Config, s.stem + ": series dimension does not match the configured model");
  const bool poisson_model = c.model == Model::Poisson;
  EstimationReport r;
  switch (e.method) {
    case EstimationMethod::MeanFrequency:
    case EstimationMethod::MeanVariance:
    case EstimationMethod::MeanPower:
    case EstimationMethod::Mle: {
      if (poisson_model || !is_line(c))
        fail(ErrorKind::Config, to_string(e.method) + " applies to the discrete line model only");
      const Eigen::MatrixXd pos = denoise_positions(s.obs.positions, e.denoise);
      r = e.method == EstimationMethod::Mle ? mle_estimate(pos.col(0), c.v, e.grid)
                                            : couplet_estimate(e.method, s.obs.times, pos.col(0), c.v);
      break;
    }
    case EstimationMethod::StateDetection:
      if (poisson_model) fail(ErrorKind::Config, "state_detection estimates per-step probabilities; use poisson");
      r = denoise_and_estimate(s.obs, targets, e.denoise);
      break;
    case EstimationMethod::Poisson: {
      if (!poisson_model) fail(ErrorKind::Config, "the poisson estimator needs a poisson model config");
      PoissonEstimate pe;
      if (s.events) {
        pe = estimate_poisson_params(*s.events, c.n_states());
      } else {
        const StateSequence states = s.states ? *s.states
                                     : e.denoise.method == Denoiser::Regression
                                         ? regression_state_detect(s.obs.positions, targets, e.denoise.window)
                                         : detect_states_polygon(denoise_positions(s.obs.positions, e.denoise), targets);
        pe = estimate_poisson_params(states, s.obs.times);
      }
      r = poisson_report(pe);
      break;
    }
  }
  r.attach_reference(off_diagonal(c.params));
  r.metadata["source"] = s.input ? *s.input : "simulated";
  if (s.seed) r.metadata["seed"] = *s.seed;
  return r;
}

Series simulated_series(const ExperimentConfig& c, std::uint64_t seed) {
  const Trajectory tr = simulate(c, seed);
  Series s{seed_stem(seed), seed, std::nullopt, observe(c, tr, seed), std::nullopt, std::nullopt};
  if (c.noise_sigma == 0.0) s.states = tr.state_sequence();
  if (c.model == Model::Poisson && c.noise_sigma == 0.0) s.events = tr.events;
  return s;
}

Series file_series(const std::string& path) {
  SeriesData d = read_series_csv(path);
  Series s{fs::path(path).stem().string(), std::nullopt, path, d.observations(), std::nullopt, std::nullopt};
  if (d.states) {
    const int n = *std::max_element(d.states->begin(), d.states->end()) + 1;
    s.states = StateSequence(*d.states, std::max(n, 2));
  }
  return s;
}

std::vector<Series> gather(const ExperimentConfig& c, const std::vector<std::string>& inputs) {
  if (!inputs.empty()) {
    std::vector<Series> out;
    for (const auto& p : inputs) out.push_back(file_series(p));
    return out;
  }
  return parallel_map<Series>(c.seeds.size(), [&](std::size_t k) { return simulated_series(c, c.seeds[k]); });
}

// ---------------------------------------------------------------------------
// subcommands

struct CommonOptions {
  std::string config_path;
  std::string seeds;
  std::string out;
  bool full = false;
  std::vector<std::string> inputs;
};

ExperimentConfig resolve(const CommonOptions& o) {
  ExperimentConfig c = load_config(o.config_path);
  if (!o.seeds.empty()) c.seeds = parse_seed_list(o.seeds);
  if (!o.out.empty()) c.output_dir = o.out;
  return c;
}

void cmd_simulate(const CommonOptions& o, std::ostream& out) {
  const ExperimentConfig c = resolve(o);
  const fs::path dir = c.output_dir;
  ensure_dir(dir);
  const auto files = parallel_map<json>(c.seeds.size(), [&](std::size_t k) {
    const std::uint64_t seed = c.seeds[k];
    const Trajectory tr = simulate(c, seed);
    const std::string name = "traj_" + std::to_string(seed) + ".csv";
    write_trajectory_csv((dir / name).string(), tr);
    json entry = {{"path", name}, {"seed", seed}, {"rows", tr.size()}};
    if (c.noise_sigma > 0.0) {
      const std::string obs_name = "obs_" + std::to_string(seed) + ".csv";
      write_observations_csv((dir / obs_name).string(), observe(c, tr, seed));
      entry["observations"] = obs_name;
      entry["noise_seed"] = seed;
    }
    return entry;
  });
  write_json(dir / "manifest.json", manifest("simulate", to_json(c), files));
  out << "wrote " << files.size() << " trajectories to " << dir.string() << "\n";
}

void cmd_estimate(const CommonOptions& o, std::ostream& out) {
  const ExperimentConfig c = resolve(o);
  const fs::path dir = c.output_dir;
  ensure_dir(dir);
  const auto series = gather(c, o.inputs);
  const auto reports =
      parallel_map<EstimationReport>(series.size(), [&](std::size_t k) { return estimate_series(c, series[k]); });
  json files = json::array();
  for (std::size_t k = 0; k < series.size(); ++k) {
    const std::string name = "report_" + series[k].stem + ".json";
    write_json(dir / name, to_json(reports[k]));
    json entry = {{"path", name}};
    if (series[k].seed) entry["seed"] = *series[k].seed;
    if (series[k].input) entry["input"] = *series[k].input;
    files.push_back(entry);
  }
  write_json(dir / "aggregate.json", aggregate(reports));
  files.push_back({{"path", "aggregate.json"}});
  write_json(dir / "manifest.json", manifest("estimate", to_json(c), files));
  const json agg = aggregate(reports);
  for (const auto& [k, v] : agg["parameters"].items())
    out << "tau" << k << " median " << format_real(v["median"].get<double>()) << "\n";
}

void cmd_denoise(const CommonOptions& o, std::ostream& out) {
  const ExperimentConfig c = resolve(o);
  const fs::path dir = c.output_dir;
  ensure_dir(dir);
  const auto series = gather(c, o.inputs);
  json files = json::array();
  for (const auto& s : series) {
    const ObservationSeries d{s.obs.times, denoise_positions(s.obs.positions, c.estimator.denoise)};
    const std::string name = "denoised_" + s.stem + ".csv";
    write_observations_csv((dir / name).string(), d);
    json entry = {{"path", name}, {"denoiser", to_string(c.estimator.denoise.method)}};
    if (s.seed) entry["seed"] = *s.seed;
    if (s.input) entry["input"] = *s.input;
    files.push_back(entry);
  }
  write_json(dir / "manifest.json", manifest("denoise", to_json(c), files));
  out << "wrote " << files.size() << " denoised series to " << dir.string() << "\n";
}

// ---------------------------------------------------------------------------
// reproduce

const Eigen::MatrixXd& table2_tau() {
  static const Eigen::MatrixXd t = [] {
    Eigen::MatrixXd m(3, 3);
    m << 0, 1e-3, 6e-3, 2e-3, 0, 3e-3, 4e-3, 5e-3, 0;
    return m;
  }();
  return t;
}

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::uint64_t k = 0; k < n; ++k) s[k] = k + 1;
  return s;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) x[k] = n == 1 ? a : a + (b - a) * k / (n - 1);
  return x;
}

struct Reproduction {
  json settings;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
};

Reproduction reproduce_t1(bool full, std::optional<std::vector<std::uint64_t>> seeds) {
  const double t01 = 5e-3, t10 = 8e-3, v = 0.1;
  const std::vector<std::int64_t> ns{10000, 100000};
  const auto s = seeds.value_or(seed_range(full ? 20 : 5));
  const auto rows = parallel_map<Table>(s.size() * ns.size(), [&](std::size_t k) {
    const std::uint64_t seed = s[k / ns.size()];
    const std::int64_t n = ns[k % ns.size()];
    const Trajectory tr = simulate_line(TauMatrix::two_state(t01, t10), v, 0.5, n, seed);
    const TauEstimate e = estimate_taus_from_states(detect_states_line(tr.positions.col(0)));
    Table t("");
    t.row("01", t01, n, seed, e.at(0, 1));
    t.row("10", t10, n, seed, e.at(1, 0));
    return t;
  });
  Table out("param,input,n_steps,seed,observed");
  for (const auto& r : rows) out.append(r);
  return {{{"model", "line"}, {"tau01", t01}, {"tau10", t10}, {"v", v}, {"x0", 0.5}, {"n_steps", ns}, {"seeds", s}},
          {{"t1.csv", out.text()}}};
}

Reproduction reproduce_t2(bool full, std::optional<std::vector<std::uint64_t>> seeds) {
  const double v = 0.01;
  const std::vector<std::int64_t> ns{10000, 100000};
  const auto s = seeds.value_or(seed_range(full ? 20 : 3));
  const auto tri = PolygonTargets::unit_triangle();
  const auto rows = parallel_map<Table>(s.size() * ns.size(), [&](std::size_t k) {
    const std::uint64_t seed = s[k / ns.size()];
    const std::int64_t n = ns[k % ns.size()];
    const Trajectory tr = simulate_polygon(TauMatrix(table2_tau()), tri, v, Eigen::Vector2d(1.0 / 3, 1.0 / 3), n, seed);
    const TauEstimate e = estimate_taus_from_states(detect_states_polygon(tr.positions, tri));
    Table t("");
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) t.row(param_key_string({i, j}), table2_tau()(i, j), n, seed, e.at(i, j));
    return t;
  });
  Table out("param,input,n_steps,seed,observed");
  for (const auto& r : rows) out.append(r);
  return {{{"model", "triangle"},
           {"tau", off_diagonal_json(table2_tau())},
           {"v", v},
           {"x0", {1.0 / 3, 1.0 / 3}},
           {"n_steps", ns},
           {"seeds", s}},
          {{"t2.csv", out.text()}}};
}

// Tables 3-7: the triangle benchmark with noise, one denoiser per table.
Reproduction reproduce_noisy(const std::string& id, const std::vector<DenoiseConfig>& variants, bool full,
                             std::optional<std::vector<std::uint64_t>> seeds) {
  const double v = 0.01, sigma = 0.01;
  const std::int64_t n = 10000;
  const auto s = seeds.value_or(seed_range(full ? 10 : 3));
  const auto tri = PolygonTargets::unit_triangle();
  const auto rows = parallel_map<Table>(s.size(), [&](std::size_t k) {
    const std::uint64_t seed = s[k];
    const Trajectory tr = simulate_polygon(TauMatrix(table2_tau()), tri, v, Eigen::Vector2d(1.0 / 3, 1.0 / 3), n, seed);
    const ObservationSeries obs = add_noise(tr, sigma, seed);
    const ParamMap observed = estimate_taus_from_states(tr.state_sequence()).to_params();
    Table t("");
    for (const DenoiseConfig& cfg : variants) {
      const EstimationReport r = denoise_and_estimate(obs, tri, cfg, observed);
      for (const auto& [key, est] : r.estimates)
        t.row(param_key_string(key), table2_tau()(key.first, key.second), seed, observed.at(key), to_string(cfg.method),
              cfg.window, est, r.relative_errors->at(key));
    }
    return t;
  });
  Table out("param,input,seed,observed,denoiser,window,estimate,rel_error");
  for (const auto& r : rows) out.append(r);
  json methods = json::array();
  for (const auto& cfg : variants) methods.push_back({{"denoiser", to_string(cfg.method)}, {"window", cfg.window}});
  return {{{"model", "triangle"},
           {"tau", off_diagonal_json(table2_tau())},
           {"v", v},
           {"x0", {1.0 / 3, 1.0 / 3}},
           {"n_steps", n},
           {"noise_sigma", sigma},
           {"noise_seed", "same as trajectory seed"},
           {"reference", "observed latent-state estimate"},
           {"variants", methods},
           {"seeds", s}},
          {{id + ".csv", out.text()}}};
}

Reproduction reproduce_t8() {
  Table out("n,monomials");
  for (int n = 2; n <= 5; ++n) out.row(n, count_stationary_monomials(n));
  return {{{"n", {2, 3, 4, 5}}}, {{"t8.csv", out.text()}}};
}

// Couplet residuals (estimate - truth) for the mean/frequency,
// mean/variance and mean/power couplets over a parameter grid.
Reproduction reproduce_boxplots(bool full, std::optional<std::vector<std::uint64_t>> seeds) {
  const double v = 0.1;
  const auto grid = linspace(0.01, 0.1, full ? 19 : 3);
  const std::vector<std::int64_t> ns =
      full ? std::vector<std::int64_t>{1000, 2000, 5000, 10000, 20000, 50000} : std::vector<std::int64_t>{1000, 5000, 20000};
  const auto s = seeds.value_or(seed_range(full ? 20 : 2));
  const EstimationMethod methods[] = {EstimationMethod::MeanFrequency, EstimationMethod::MeanVariance,
                                      EstimationMethod::MeanPower};
  const std::size_t cells = grid.size() * grid.size();
  const auto rows = parallel_map<Table>(ns.size() * cells * s.size(), [&](std::size_t k) {
    const std::int64_t n = ns[k / (cells * s.size())];
    const std::size_t cell = (k / s.size()) % cells;
    const std::uint64_t seed = s[k % s.size()];
    const double t01 = grid[cell / grid.size()], t10 = grid[cell % grid.size()];
    const Trajectory tr = simulate_line(TauMatrix::two_state(t01, t10), v, 0.5, n, seed);
    Table t("");
    for (EstimationMethod m : methods) {
      double r01 = NAN, r10 = NAN;
      try {
        const EstimationReport r = couplet_estimate(m, tr.times, tr.positions.col(0), v);
        r01 = r.estimates.at({0, 1}) - t01;
        r10 = r.estimates.at({1, 0}) - t10;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InfeasibleMoments && e.kind() != ErrorKind::DegenerateChain) throw;
      }
      t.row(to_string(m), n, t01, t10, seed, r01, r10);
    }
    return t;
  });
  Table out("method,n_steps,tau01,tau10,seed,resid01,resid10");
  for (const auto& r : rows) out.append(r);
  return {{{"model", "line"}, {"v", v}, {"x0", 0.5}, {"grid", grid}, {"n_steps", ns}, {"seeds", s},
           {"residual", "estimate - input; nan when the moments are infeasible"}},
          {{"boxplots.csv", out.text()}}};
}

// Mean |error| of the mean/frequency couplet per grid cell.
Reproduction reproduce_surfaces(bool full, std::optional<std::vector<std::uint64_t>> seeds) {
  const double v = 0.1;
  const std::int64_t n = 20000;
  const auto grid = linspace(0.01, 0.1, full ? 19 : 5);
  const auto s = seeds.value_or(seed_range(full ? 20 : 5));
  const auto rows = parallel_map<Table>(grid.size() * grid.size(), [&](std::size_t cell) {
    const double t01 = grid[cell / grid.size()], t10 = grid[cell % grid.size()];
    double e01 = 0.0, e10 = 0.0;
    for (std::uint64_t seed : s) {
      const Trajectory tr = simulate_line(TauMatrix::two_state(t01, t10), v, 0.5, n, seed);
      const EstimationReport r = couplet_estimate(EstimationMethod::MeanFrequency, tr.times, tr.positions.col(0), v);
      e01 += std::abs(r.estimates.at({0, 1}) - t01);
      e10 += std::abs(r.estimates.at({1, 0}) - t10);
    }
    Table t("");
    t.row(t01, t10, e01 / s.size(), e10 / s.size(), s.size());
    return t;
  });
  Table out("tau01,tau10,mae01,mae10,n_seeds");
  for (const auto& r : rows) out.append(r);
  return {{{"model", "line"}, {"method", "mean_frequency"}, {"v", v}, {"x0", 0.5}, {"n_steps", n}, {"grid", grid},
           {"seeds", s}},
          {{"surfaces.csv", out.text()}}};
}

Reproduction reproduce_likelihood(bool full, std::optional<std::vector<std::uint64_t>> seeds) {
  const double t01 = 0.05, t10 = 0.08, v = 0.1;
  const std::int64_t n = 10000;
  const std::uint64_t seed = seeds ? seeds->front() : 1;
  const Trajectory tr = simulate_line(TauMatrix::two_state(t01, t10), v, 0.5, n, seed);
  const Eigen::VectorXd x = tr.positions.col(0);
  const auto axis = linspace(0.005, 0.15, full ? 146 : 30);
  const auto rows = parallel_map<Table>(axis.size(), [&](std::size_t i) {
    Table t("");
    for (double b : axis) t.row(axis[i], b, negative_log_likelihood(x, axis[i], b, v));
    return t;
  });
  Table out("tau01,tau10,nll");
  for (const auto& r : rows) out.append(r);
  EstimationReport best = mle_estimate(x, v);
  best.attach_reference({{{0, 1}, t01}, {{1, 0}, t10}});
  return {{{"model", "line"}, {"tau01", t01}, {"tau10", t10}, {"v", v}, {"x0", 0.5}, {"n_steps", n}, {"seed", seed},
           {"axis", {{"lo", axis.front()}, {"hi", axis.back()}, {"points", axis.size()}}}},
          {{"likelihood.csv", out.text()}, {"likelihood_min.json", to_json(best).dump(2) + "\n"}}};
}

// Noisy x coordinate of the triangle benchmark and its DFT magnitude.
Reproduction reproduce_frequencies(std::optional<std::vector<std::uint64_t>> seeds) {
  const double v = 0.01, sigma = 0.01;
  const std::int64_t n = 10000;
  const std::uint64_t seed = seeds ? seeds->front() : 1;
  const auto tri = PolygonTargets::unit_triangle();
  const Trajectory tr = simulate_polygon(TauMatrix(table2_tau()), tri, v, Eigen::Vector2d(1.0 / 3, 1.0 / 3), n, seed);
  const ObservationSeries obs = add_noise(tr, sigma, seed);
  const Eigen::VectorXd x = obs.positions.col(0);
  const Eigen::VectorXd mag = dft_magnitude(Signal1D(x));
  Table sig("t,x"), dft("k,magnitude");
  for (Eigen::Index k = 0; k < x.size(); ++k) sig.row(obs.times[k], x[k]);
  for (Eigen::Index k = 0; k < mag.size(); ++k) dft.row(k, mag[k]);
  return {{{"model", "triangle"}, {"tau", off_diagonal_json(table2_tau())}, {"v", v}, {"n_steps", n},
           {"noise_sigma", sigma}, {"seed", seed}},
          {{"frequencies_signal.csv", sig.text()}, {"frequencies_dft.csv", dft.text()}}};
}

DenoiseConfig with_method(Denoiser d, int window = 1) {
  DenoiseConfig c;
  c.method = d;
  c.window = window;
  return c;
}

const std::vector<std::string>& reproduce_ids() {
  static const std::vector<std::string> ids{"t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8",
                                            "boxplots", "surfaces", "likelihood", "frequencies"};
  return ids;
}

void cmd_reproduce(const std::string& id, const CommonOptions& o, std::ostream& out) {
  std::optional<std::vector<std::uint64_t>> seeds;
  if (!o.seeds.empty()) seeds = parse_seed_list(o.seeds);
  const bool full = o.full;
  Reproduction r;
  if (id == "t1") r = reproduce_t1(full, seeds);
  else if (id == "t2") r = reproduce_t2(full, seeds);
  else if (id == "t3") {
    std::vector<DenoiseConfig> windows;
    for (int w : {1, 3, 5, 10, 15, 20}) windows.push_back(with_method(Denoiser::Regression, w));
    r = reproduce_noisy(id, windows, full, seeds);
  } else if (id == "t4") r = reproduce_noisy(id, {with_method(Denoiser::Lwpr)}, full, seeds);
  else if (id == "t5") r = reproduce_noisy(id, {with_method(Denoiser::Wavelet)}, full, seeds);
  else if (id == "t6") r = reproduce_noisy(id, {with_method(Denoiser::Butterworth)}, full, seeds);
  else if (id == "t7") r = reproduce_noisy(id, {with_method(Denoiser::Tv)}, full, seeds);
  else if (id == "t8") r = reproduce_t8();
  else if (id == "boxplots") r = reproduce_boxplots(full, seeds);
  else if (id == "surfaces") r = reproduce_surfaces(full, seeds);
  else if (id == "likelihood") r = reproduce_likelihood(full, seeds);
  else if (id == "frequencies") r = reproduce_frequencies(seeds);
  else fail(ErrorKind::Config, "unknown reproduction id '" + id + "'");

  const fs::path dir = o.out.empty() ? fs::path("out") / id : fs::path(o.out);
  ensure_dir(dir);
  json files = json::array();
  for (const auto& [name, text] : r.files) {
    write_text(dir / name, text);
    files.push_back({{"path", name}});
  }
  r.settings["id"] = id;
  r.settings["scale"] = full ? "full" : "desk";
  write_json(dir / "manifest.json", manifest("reproduce", r.settings, files));
  out << "wrote " << r.files.size() << " file(s) for " << id << " to " << dir.string() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate and estimate switching dynamics of the Buridan's-ass system"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(BURIDAN_VERSION));

  CommonOptions o;
  auto add_config = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--config", o.config_path, "experiment config (JSON)");
    if (required) opt->required();
    sub->add_option("--seed", o.seeds, "comma-separated seeds, overriding the config");
    sub->add_option("--out", o.out, "output directory, overriding the config");
  };

  auto* simulate = app.add_subcommand("simulate", "write one trajectory CSV per seed");
  add_config(simulate, true);

  auto* estimate = app.add_subcommand("estimate", "estimate parameters from CSV inputs or fresh simulations");
  add_config(estimate, true);
  estimate->add_option("inputs", o.inputs, "trajectory or observation CSV files")->check(CLI::ExistingFile);

  auto* denoise = app.add_subcommand("denoise", "apply the configured smoother to each series");
  add_config(denoise, true);
  denoise->add_option("inputs", o.inputs, "trajectory or observation CSV files")->check(CLI::ExistingFile);

  std::string id;
  auto* reproduce = app.add_subcommand("reproduce", "regenerate a named benchmark dataset");
  reproduce->add_option("id", id, "t1..t8, boxplots, surfaces, likelihood, frequencies")
      ->required()
      ->check(CLI::IsMember(reproduce_ids()));
  add_config(reproduce, false);
  reproduce->add_flag("--full", o.full, "full replicate counts and grids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*simulate) cmd_simulate(o, out);
    else if (*estimate) cmd_estimate(o, out);
    else if (*denoise) cmd_denoise(o, out);
    else if (*reproduce) cmd_reproduce(id, o, out);
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  }
}

}  // namespace buridan::cli
