#include "config.hpp"

#include <fstream>
#include <sstream>

#include "buridan/error.hpp"
#include "buridan/report.hpp"

namespace buridan::cli {

using nlohmann::json;

namespace {

constexpr std::pair<Model, const char*> kModelNames[] = {
    {Model::Line, "line"}, {Model::Triangle, "triangle"}, {Model::Polygon, "polygon"}, {Model::Poisson, "poisson"}};

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::Config, what); }

ParamKey parse_key(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma != std::string::npos) return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
  } catch (const std::exception&) {
    config_error("bad parameter key '" + s + "'");
  }
  if (s.size() == 2 && std::isdigit(static_cast<unsigned char>(s[0])) && std::isdigit(static_cast<unsigned char>(s[1])))
    return {s[0] - '0', s[1] - '0'};
  config_error("bad parameter key '" + s + "' (expected \"ij\" or \"i,j\")");
}

Eigen::MatrixXd parse_params(const json& j) {
  if (!j.is_object() || j.empty()) config_error("params must be a non-empty object of \"ij\": value");
  ParamMap entries;
  int n = 0;
  for (const auto& [k, val] : j.items()) {
    const ParamKey key = parse_key(k);
    if (key.first < 0 || key.second < 0 || key.first == key.second) config_error("bad parameter key '" + k + "'");
    if (!val.is_number()) config_error("parameter " + k + " must be a number");
    entries[key] = val.get<double>();
    n = std::max({n, key.first + 1, key.second + 1});
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [key, value] : entries) m(key.first, key.second) = value;
  return m;
}

Eigen::MatrixXd parse_points(const json& j) {
  if (!j.is_array() || j.size() < 2) config_error("vertices must be a list of at least two points");
  const auto d = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != d) config_error("vertices must all have the same dimension");
    for (std::size_t c = 0; c < d; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json points_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

void validate(const ExperimentConfig& c) {
  if (c.seeds.empty()) config_error("seeds must be non-empty");
  if (c.n_steps < 2) config_error("n_steps must be at least 2");
  if (!(c.v > 0.0)) config_error("v must be positive");
  if (!(c.noise_sigma >= 0.0)) config_error("noise_sigma must be nonnegative");
  const int n = c.n_states();
  switch (c.model) {
    case Model::Line:
      if (n != 2) config_error("line model takes params 01 and 10");
      break;
    case Model::Triangle:
      if (n != 3) config_error("triangle model needs a 3-state parameter matrix");
      break;
    case Model::Polygon:
      if (!c.vertices) config_error("polygon model needs vertices");
      break;
    case Model::Poisson:
      if (!(c.sample_dt > 0.0)) config_error("sample_dt must be positive");
      if (c.horizon && !(*c.horizon > 0.0)) config_error("horizon must be positive");
      break;
  }
  if (c.vertices && c.vertices->rows() != n)
    config_error("number of vertices differs from the number of states in params");
  // The library constructors carry the remaining checks.
  try {
    if (c.model == Model::Poisson)
      PoissonParams{c.params};
    else
      build_transition_matrix(TauMatrix(c.params));
    const PolygonTargets targets = c.targets();
    const Eigen::VectorXd p0 = c.start();
    if (p0.size() != targets.dim() || !targets.strictly_inside(p0)) config_error("x0 must lie strictly inside the pen");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    config_error(e.what());
  }
}

}  // namespace

std::string to_string(Model m) {
  for (const auto& [k, name] : kModelNames)
    if (k == m) return name;
  fail(ErrorKind::Internal, "unknown model");
}

Model parse_model(const std::string& name) {
  for (const auto& [k, n] : kModelNames)
    if (name == n) return k;
  config_error("unknown model '" + name + "'");
}

PolygonTargets ExperimentConfig::targets() const {
  if (vertices) return PolygonTargets(*vertices);
  if (model == Model::Line || n_states() == 2) return PolygonTargets::line();
  if (n_states() == 3) return PolygonTargets::unit_triangle();
  config_error("vertices are required for " + std::to_string(n_states()) + " states");
}

Eigen::VectorXd ExperimentConfig::start() const {
  if (x0) return *x0;
  const PolygonTargets t = targets();
  if (t.dim() == 1) return Eigen::VectorXd::Constant(1, 0.5);
  return t.vertices().colwise().mean().transpose();
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  try {
    if (!j.is_object()) config_error("config must be a JSON object");
    for (const auto& [k, val] : j.items()) {
      static const char* known[] = {"model",       "params", "vertices",  "v",         "n_steps",   "x0",
                                    "noise_sigma", "seeds",  "horizon",   "sample_dt", "estimator", "output_dir"};
      if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return k == s; }) == std::end(known))
        config_error("unknown config key '" + k + "'");
    }
    if (!j.contains("model") || !j.contains("params")) config_error("config needs 'model' and 'params'");
    c.model = parse_model(j.at("model").get<std::string>());
    c.params = parse_params(j.at("params"));
    if (j.contains("vertices")) c.vertices = parse_points(j.at("vertices"));
    read(j, "v", c.v);
    read(j, "n_steps", c.n_steps);
    if (j.contains("x0")) {
      const json& x = j.at("x0");
      if (x.is_number()) {
        c.x0 = Eigen::VectorXd::Constant(1, x.get<double>());
      } else {
        const auto v = x.get<std::vector<double>>();
        c.x0 = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      }
    }
    read(j, "noise_sigma", c.noise_sigma);
    read(j, "seeds", c.seeds);
    if (j.contains("horizon")) c.horizon = j.at("horizon").get<double>();
    read(j, "sample_dt", c.sample_dt);
    read(j, "output_dir", c.output_dir);
    if (j.contains("estimator")) {
      const json& e = j.at("estimator");
      if (e.contains("method")) c.estimator.method = parse_method(e.at("method").get<std::string>());
      if (e.contains("denoise")) {
        const json& d = e.at("denoise");
        DenoiseConfig& dc = c.estimator.denoise;
        if (d.contains("method")) dc.method = parse_denoiser(d.at("method").get<std::string>());
        read(d, "window", dc.window);
        if (d.contains("lwpr")) read(d["lwpr"], "h", dc.lwpr.h), read(d["lwpr"], "degree", dc.lwpr.degree);
        if (d.contains("wavelet"))
          read(d["wavelet"], "levels", dc.wavelet.levels), read(d["wavelet"], "threshold_scale", dc.wavelet.threshold_scale);
        if (d.contains("butterworth"))
          read(d["butterworth"], "order", dc.butterworth.order),
              read(d["butterworth"], "cutoff_bins", dc.butterworth.cutoff_bins);
        if (d.contains("tv")) {
          read(d["tv"], "gamma", dc.tv.gamma);
          read(d["tv"], "lambda", dc.tv.lambda);
          read(d["tv"], "n_iters", dc.tv.n_iters);
        }
      }
      if (e.contains("grid")) {
        const json& g = e.at("grid");
        read(g, "lo", c.estimator.grid.lo);
        read(g, "hi", c.estimator.grid.hi);
        read(g, "points", c.estimator.grid.points);
        read(g, "tolerance", c.estimator.grid.tolerance);
      }
    }
  } catch (const json::exception& e) {
    config_error(std::string("malformed config: ") + e.what());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    config_error("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json params = json::object();
  for (int i = 0; i < c.n_states(); ++i)
    for (int k = 0; k < c.n_states(); ++k)
      if (i != k) params[param_key_string({i, k})] = c.params(i, k);
  const DenoiseConfig& d = c.estimator.denoise;
  const Eigen::VectorXd p0 = c.start();
  json j = {
      {"model", to_string(c.model)},
      {"params", params},
      {"vertices", points_json(c.targets().vertices())},
      {"v", c.v},
      {"n_steps", c.n_steps},
      {"x0", std::vector<double>(p0.begin(), p0.end())},
      {"noise_sigma", c.noise_sigma},
      {"seeds", c.seeds},
      {"output_dir", c.output_dir},
      {"estimator",
       {{"method", to_string(c.estimator.method)},
        {"denoise",
         {{"method", to_string(d.method)},
          {"window", d.window},
          {"lwpr", {{"h", d.lwpr.h}, {"degree", d.lwpr.degree}}},
          {"wavelet", {{"levels", d.wavelet.levels}, {"threshold_scale", d.wavelet.threshold_scale}}},
          {"butterworth", {{"order", d.butterworth.order}, {"cutoff_bins", d.butterworth.cutoff_bins}}},
          {"tv", {{"gamma", d.tv.gamma}, {"lambda", d.tv.lambda}, {"n_iters", d.tv.n_iters}}}}},
        {"grid",
         {{"lo", c.estimator.grid.lo},
          {"hi", c.estimator.grid.hi},
          {"points", c.estimator.grid.points},
          {"tolerance", c.estimator.grid.tolerance}}}}},
  };
  if (c.model == Model::Poisson) {
    j["horizon"] = c.horizon.value_or(static_cast<double>(c.n_steps));
    j["sample_dt"] = c.sample_dt;
  }
  return j;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      config_error("bad seed '" + item + "' in --seed list");
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) config_error("--seed needs at least one seed");
  return seeds;
}

Trajectory simulate(const ExperimentConfig& c, std::uint64_t seed) {
  const PolygonTargets targets = c.targets();
  const Eigen::VectorXd p0 = c.start();
  switch (c.model) {
    case Model::Line:
      return simulate_line(TauMatrix(c.params), c.v, p0[0], c.n_steps, seed);
    case Model::Triangle:
    case Model::Polygon:
      return simulate_polygon(TauMatrix(c.params), targets, c.v, p0, c.n_steps, seed);
    case Model::Poisson:
      return simulate_poisson(PoissonParams(c.params), targets, c.v, p0,
                              c.horizon.value_or(static_cast<double>(c.n_steps)), c.sample_dt, seed);
  }
  fail(ErrorKind::Internal, "unknown model");
}

ObservationSeries observe(const ExperimentConfig& c, const Trajectory& tr, std::uint64_t seed) {
  return add_noise(tr, c.noise_sigma, seed);
}

}  // namespace buridan::cli
