#pragma once

#include "hydrostate/network.hpp"
#include "hydrostate/scenario.hpp"
#include "hydrostate/ukf.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hydrostate {

// Estimator settings as read from a configuration file. Covariances are a
// single multiplier of the identity or a full diagonal.
struct EstimationConfig {
  int K = 50;
  int K_u = 5;
  std::vector<double> q = {1.0};
  std::vector<double> r = {1e-4};
  std::vector<double> p0 = {1.0};
  SigmaParams sigma;
  std::optional<double> alpha_blend;  // default n_ca / n
  double gamma_weight = kDefaultGammaWeight;
  double epsilon_h = kDefaultEpsilonH;
  // Informational sensor counts; checked against the sensor file when given.
  std::optional<int> n_s;
  std::optional<int> n_ca;

  UkfConfig ukf_config(Index n, Index n_s, Index n_ca) const;
};

// Throws ParseError / InputError.
EstimationConfig parse_estimation_config(std::string_view json_text);
std::string serialize_estimation_config(const EstimationConfig& cfg);

// {"leak_node": id, "leak_size_lps": x, "hours": [...], "seed": s,
//  "uncertainty": {"pressure_noise_m", "demand_noise_lps", "pipe_param_rel",
//                  "demand_pattern_rel"}}
ScenarioSpec parse_scenario_spec(std::string_view json_text, const Network& net);
std::string serialize_scenario_spec(const ScenarioSpec& spec, const Network& net);

// FNV-1a 64 of a text, as 16 hex digits.
std::string content_hash(std::string_view text);

}  // namespace hydrostate
