#include "hydrostate/scenario.hpp"

#include "hydrostate/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace hydrostate {

void ScenarioSpec::validate(const Network& net) const {
  if (!(leak_size >= 0.0)) throw InputError("scenario: leak size must be non-negative");
  if (leak_node && (*leak_node < 0 || *leak_node >= net.junction_count())) {
    throw InputError("scenario: leak node must be a junction");
  }
  const auto in_range = [](double v) { return v >= 0.0 && v <= 0.1; };
  if (!in_range(uncertainty.pipe_param_rel) || !in_range(uncertainty.demand_pattern_rel)) {
    throw InputError("scenario: relative uncertainties must lie in [0, 0.1]");
  }
  if (!(uncertainty.pressure_noise_m >= 0.0) || !(uncertainty.demand_noise_m3s >= 0.0)) {
    throw InputError("scenario: noise bounds must be non-negative");
  }
  for (std::size_t i = 0; i < hours.size(); ++i) {
    if (hours[i] < 0 || hours[i] > 23) throw InputError("scenario: hours must lie in 0..23");
    if (std::find(hours.begin(), hours.begin() + static_cast<std::ptrdiff_t>(i), hours[i]) !=
        hours.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw InputError("scenario: hour " + std::to_string(hours[i]) + " is listed twice");
    }
  }
}

Vector MeasurementSet::stacked() const {
  Vector y(heads.size() + demands.size());
  y << heads, demands;
  return y;
}

const InstantRecord& TimeSeriesData::at_hour(int hour) const {
  const auto it = std::find_if(instants.begin(), instants.end(), [&](const InstantRecord& r) { return r.hour == hour; });
  if (it == instants.end()) throw InputError("no data for hour " + std::to_string(hour));
  return *it;
}

TimeSeriesData generate(const Network& net, const SensorConfig& sensors, const ScenarioSpec& spec) {
  spec.validate(net);
  validate_sensors(net, sensors);

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto& u = spec.uncertainty;

  std::vector<double> diameters(static_cast<std::size_t>(net.pipe_count()));
  std::vector<double> roughness(diameters.size());
  for (Index k = 0; k < net.pipe_count(); ++k) {
    diameters[static_cast<std::size_t>(k)] = net.pipe(k).diameter * (1.0 + u.pipe_param_rel * unit(rng));
    roughness[static_cast<std::size_t>(k)] = net.pipe(k).roughness * (1.0 + u.pipe_param_rel * unit(rng));
  }
  const Network truth_net = net.with_pipe_parameters(diameters, roughness);
  const Conductivity cond = conductivity(truth_net);

  const std::vector<int> hours = spec.hours.empty() ? all_hours() : spec.hours;
  TimeSeriesData data;
  data.instants.reserve(hours.size());
  for (const int hour : hours) {
    Vector demands = net.junction_demands(hour);
    for (Index j = 0; j < demands.size(); ++j) demands(j) *= 1.0 + u.demand_pattern_rel * unit(rng);
    if (spec.leak_node) demands(*spec.leak_node) += spec.leak_size;

    InstantRecord rec;
    rec.hour = hour;
    try {
      rec.h_true = solve_steady_state(truth_net, cond, demands, spec.solver).h;
    } catch (const NumericalError& e) {
      throw NumericalError("hour " + std::to_string(hour) + ": " + e.what(), e.residual());
    }
    rec.c_true = nodal_demands(truth_net, cond, rec.h_true);
    // Junction entries are the prescribed demands; the solver matches them to
    // its tolerance, reservoirs keep the computed inflow.
    rec.c_true.head(net.junction_count()) = demands;

    rec.measured.heads.resize(sensors.pressure_count());
    for (Index r = 0; r < sensors.pressure_count(); ++r) {
      rec.measured.heads(r) = rec.h_true(sensors.pressure_nodes[static_cast<std::size_t>(r)]) +
                              u.pressure_noise_m * unit(rng);
    }
    rec.measured.demands.resize(sensors.amr_count());
    for (Index a = 0; a < sensors.amr_count(); ++a) {
      rec.measured.demands(a) = rec.c_true(sensors.amr_nodes[static_cast<std::size_t>(a)]) +
                                u.demand_noise_m3s * unit(rng);
    }
    data.instants.push_back(std::move(rec));
  }
  return data;
}

HeadState model_reference_heads(const Network& net, int hour, const SolverOptions& options) {
  return solve_steady_state(net, conductivity(net), net.junction_demands(hour), options).h;
}

std::vector<int> all_hours(int count) {
  std::vector<int> hours(static_cast<std::size_t>(count));
  std::iota(hours.begin(), hours.end(), 0);
  return hours;
}

std::vector<int> every_other_hour(int count) {
  std::vector<int> hours;
  for (int h = 0; h < count; h += 2) hours.push_back(h);
  return hours;
}

double rmse(const Vector& h_true, const Vector& h_est) {
  if (h_true.size() != h_est.size()) throw std::invalid_argument("rmse: size mismatch");
  if (h_true.size() == 0) return 0.0;
  const Vector e = h_true - h_est;
  return std::sqrt(e.dot(e) / static_cast<double>(e.size()));
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw InputError("summarize: empty input");
  Summary s;
  const double count = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  double ss = 0.0;
  for (const double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = values.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  s.max = *std::max_element(values.begin(), values.end());
  s.min = *std::min_element(values.begin(), values.end());
  return s;
}

}  // namespace hydrostate
