#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace buridan {

enum class EstimationMethod { MeanFrequency, MeanVariance, MeanPower, Mle, StateDetection, Poisson };

std::string to_string(EstimationMethod m);
EstimationMethod parse_method(const std::string& name);

/// (i, j) parameter index; serialized as the digit string "ij".
using ParamKey = std::pair<int, int>;
/// NaN marks a parameter that could not be estimated.
using ParamMap = std::map<ParamKey, double>;

std::string param_key_string(const ParamKey& key);

struct EstimationReport {
  EstimationMethod method = EstimationMethod::StateDetection;
  ParamMap estimates;
  std::optional<ParamMap> reference;
  std::optional<ParamMap> relative_errors;
  std::vector<std::string> warnings;
  nlohmann::json metadata = nlohmann::json::object();

  /// Sets `reference` and fills relative_errors = |est - ref| / ref for
  /// every key present in both; missing estimates give NaN.
  void attach_reference(const ParamMap& ref);

  /// Mean of the finite relative errors; NaN when there are none.
  double mean_relative_error() const;
};

nlohmann::json to_json(const EstimationReport& report);

}  // namespace buridan
