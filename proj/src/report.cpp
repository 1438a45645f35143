#include "buridan/report.hpp"

#include <cmath>
#include <limits>

#include "buridan/error.hpp"

namespace buridan {

namespace {

constexpr std::pair<EstimationMethod, const char*> kMethodNames[] = {
    {EstimationMethod::MeanFrequency, "mean_frequency"}, {EstimationMethod::MeanVariance, "mean_variance"},
    {EstimationMethod::MeanPower, "mean_power"},         {EstimationMethod::Mle, "mle"},
    {EstimationMethod::StateDetection, "state_detection"}, {EstimationMethod::Poisson, "poisson"},
};

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

nlohmann::json param_object(const ParamMap& m) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, value] : m) out[param_key_string(key)] = number_or_null(value);
  return out;
}

}  // namespace

std::string to_string(EstimationMethod m) {
  for (const auto& [method, name] : kMethodNames)
    if (method == m) return name;
  fail(ErrorKind::Internal, "unknown estimation method");
}

EstimationMethod parse_method(const std::string& name) {
  for (const auto& [method, n] : kMethodNames)
    if (name == n) return method;
  fail(ErrorKind::Config, "unknown estimation method '" + name + "'");
}

std::string param_key_string(const ParamKey& key) { return std::to_string(key.first) + std::to_string(key.second); }

void EstimationReport::attach_reference(const ParamMap& ref) {
  reference = ref;
  ParamMap err;
  for (const auto& [key, truth] : ref) {
    const auto it = estimates.find(key);
    const double est = it == estimates.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
    err[key] = std::abs(est - truth) / truth;
  }
  relative_errors = std::move(err);
}

double EstimationReport::mean_relative_error() const {
  if (!relative_errors) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  int count = 0;
  for (const auto& [key, e] : *relative_errors) {
    if (!std::isfinite(e)) continue;
    sum += e;
    ++count;
  }
  return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

nlohmann::json to_json(const EstimationReport& report) {
  nlohmann::json j;
  j["method"] = to_string(report.method);
  j["estimates"] = param_object(report.estimates);
  if (report.reference) j["reference"] = param_object(*report.reference);
  if (report.relative_errors) j["relative_errors"] = param_object(*report.relative_errors);
  j["warnings"] = report.warnings;
  if (!report.metadata.empty()) j["metadata"] = report.metadata;
  return j;
}

}  // namespace buridan
