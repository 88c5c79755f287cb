#include "hydrostate/config.hpp"

#include "hydrostate/error.hpp"

#include <json.hpp>

#include <cstdio>

namespace hydrostate {

namespace {

using nlohmann::json;

json parse_document(std::string_view text, const char* what) {
  try {
    json doc = json::parse(text.begin(), text.end());
    if (!doc.is_object()) throw InputError(std::string(what) + " must be a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what(), 1);
  }
}

std::vector<double> diagonal_field(const json& doc, const char* key, std::vector<double> fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc[key];
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array() && !v.empty()) {
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw InputError(std::string("config: '") + key + "' entries must be numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  throw InputError(std::string("config: '") + key + "' must be a number or a non-empty array");
}

Vector expand(const std::vector<double>& values, Index size, const char* what) {
  if (values.size() == 1) return Vector::Constant(size, values.front());
  if (static_cast<Index>(values.size()) != size) {
    throw InputError(std::string("config: ") + what + " diagonal needs " + std::to_string(size) + " entries");
  }
  return Eigen::Map<const Vector>(values.data(), size);
}

json diagonal_json(const std::vector<double>& v) {
  if (v.size() == 1) return v.front();
  return v;
}

int int_field(const json& doc, const char* key, int fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number_integer()) throw InputError(std::string("config: '") + key + "' must be an integer");
  return doc[key].get<int>();
}

double number_field(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number()) throw InputError(std::string("'") + key + "' must be a number");
  return doc[key].get<double>();
}

}  // namespace

UkfConfig EstimationConfig::ukf_config(Index n, Index ns, Index nca) const {
  if (n_s && *n_s != ns) {
    throw InputError("config n_s = " + std::to_string(*n_s) + " but the sensor set has " + std::to_string(ns));
  }
  if (n_ca && *n_ca != nca) {
    throw InputError("config n_ca = " + std::to_string(*n_ca) + " but the sensor set has " + std::to_string(nca));
  }
  UkfConfig cfg;
  cfg.K = K;
  cfg.K_u = K_u;
  cfg.q_diag = expand(q, n, "Q");
  // R is given in measurement units, m^2 for heads and (l/s)^2 for demands.
  cfg.r_diag = expand(r, ns + nca, "R");
  cfg.r_diag.tail(nca) /= kLitresPerCubicMetre * kLitresPerCubicMetre;
  cfg.p0_diag = expand(p0, n, "P0");
  cfg.sigma = sigma;
  cfg.alpha_blend = alpha_blend.value_or(static_cast<double>(nca) / static_cast<double>(n));
  cfg.epsilon_h = epsilon_h;
  cfg.validate(n, ns + nca);
  return cfg;
}

EstimationConfig parse_estimation_config(std::string_view json_text) {
  const json doc = parse_document(json_text, "config");
  EstimationConfig cfg;
  cfg.K = int_field(doc, "K", cfg.K);
  cfg.K_u = int_field(doc, "K_u", cfg.K_u);
  cfg.q = diagonal_field(doc, "Q", cfg.q);
  cfg.r = diagonal_field(doc, "R", cfg.r);
  cfg.p0 = diagonal_field(doc, "P0", cfg.p0);
  if (doc.contains("sigma_points")) {
    const auto& sp = doc["sigma_points"];
    cfg.sigma.a = number_field(sp, "a", cfg.sigma.a);
    cfg.sigma.b = number_field(sp, "b", cfg.sigma.b);
    cfg.sigma.k = number_field(sp, "k", cfg.sigma.k);
  }
  if (doc.contains("alpha_blend")) cfg.alpha_blend = number_field(doc, "alpha_blend", 0.0);
  cfg.gamma_weight = number_field(doc, "gamma_weight", cfg.gamma_weight);
  cfg.epsilon_h = number_field(doc, "epsilon_h", cfg.epsilon_h);
  if (doc.contains("n_s")) cfg.n_s = int_field(doc, "n_s", 0);
  if (doc.contains("n_ca")) cfg.n_ca = int_field(doc, "n_ca", 0);

  if (cfg.K < 0 || cfg.K_u < 1) throw InputError("config: K must be >= 0 and K_u >= 1");
  for (const auto* list : {&cfg.q, &cfg.r, &cfg.p0}) {
    for (const double v : *list) {
      if (!(v > 0.0)) throw InputError("config: covariance entries must be positive");
    }
  }
  if (!(cfg.gamma_weight > 0.0) || !(cfg.epsilon_h > 0.0)) {
    throw InputError("config: gamma_weight and epsilon_h must be positive");
  }
  return cfg;
}

std::string serialize_estimation_config(const EstimationConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["K"] = cfg.K;
  doc["K_u"] = cfg.K_u;
  doc["Q"] = diagonal_json(cfg.q);
  doc["R"] = diagonal_json(cfg.r);
  doc["P0"] = diagonal_json(cfg.p0);
  doc["sigma_points"] = {{"a", cfg.sigma.a}, {"b", cfg.sigma.b}, {"k", cfg.sigma.k}};
  if (cfg.alpha_blend) doc["alpha_blend"] = *cfg.alpha_blend;
  doc["gamma_weight"] = cfg.gamma_weight;
  doc["epsilon_h"] = cfg.epsilon_h;
  if (cfg.n_s) doc["n_s"] = *cfg.n_s;
  if (cfg.n_ca) doc["n_ca"] = *cfg.n_ca;
  return doc.dump(2) + "\n";
}

ScenarioSpec parse_scenario_spec(std::string_view json_text, const Network& net) {
  const json doc = parse_document(json_text, "scenario");
  ScenarioSpec spec;
  if (doc.contains("leak_node") && !doc["leak_node"].is_null()) {
    const auto& v = doc["leak_node"];
    spec.leak_node = net.node_index(v.is_string() ? v.get<std::string>() : v.dump());
    spec.leak_size = kReferenceLeakSize;
  }
  spec.leak_size = number_field(doc, "leak_size_lps", spec.leak_size * kLitresPerCubicMetre) / kLitresPerCubicMetre;
  if (doc.contains("hours")) {
    for (const auto& h : doc["hours"]) {
      if (!h.is_number_integer()) throw InputError("scenario: hours must be integers");
      spec.hours.push_back(h.get<int>());
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      throw InputError("scenario: seed must be an integer");
    }
    spec.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("uncertainty")) {
    const auto& u = doc["uncertainty"];
    auto& out = spec.uncertainty;
    out.pressure_noise_m = number_field(u, "pressure_noise_m", out.pressure_noise_m);
    out.demand_noise_m3s =
        number_field(u, "demand_noise_lps", out.demand_noise_m3s * kLitresPerCubicMetre) / kLitresPerCubicMetre;
    out.pipe_param_rel = number_field(u, "pipe_param_rel", out.pipe_param_rel);
    out.demand_pattern_rel = number_field(u, "demand_pattern_rel", out.demand_pattern_rel);
  }
  spec.validate(net);
  return spec;
}

std::string serialize_scenario_spec(const ScenarioSpec& spec, const Network& net) {
  nlohmann::ordered_json doc;
  doc["leak_node"] = spec.leak_node ? json(net.node(*spec.leak_node).id) : json(nullptr);
  doc["leak_size_lps"] = spec.leak_size * kLitresPerCubicMetre;
  doc["hours"] = spec.hours.empty() ? all_hours() : spec.hours;
  doc["seed"] = spec.seed;
  doc["uncertainty"] = {{"pressure_noise_m", spec.uncertainty.pressure_noise_m},
                        {"demand_noise_lps", spec.uncertainty.demand_noise_m3s * kLitresPerCubicMetre},
                        {"pipe_param_rel", spec.uncertainty.pipe_param_rel},
                        {"demand_pattern_rel", spec.uncertainty.demand_pattern_rel}};
  return doc.dump(2) + "\n";
}

std::string content_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hydrostate
