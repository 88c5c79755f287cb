#pragma once

#include "hydrostate/hydraulics.hpp"
#include "hydrostate/network.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hydrostate {

struct Uncertainty {
  double pressure_noise_m = 0.01;    // +/- bound of head readings
  double demand_noise_m3s = 1e-5;    // +/- bound of AMR readings
  double pipe_param_rel = 0.01;      // diameter and roughness, relative
  double demand_pattern_rel = 0.01;  // nodal demand, relative
};

// The 4.5 l/s leak of the reference experiment.
inline constexpr double kReferenceLeakSize = 4.5e-3;  // m^3/s

struct ScenarioSpec {
  std::optional<Index> leak_node;
  double leak_size = 0.0;  // m^3/s
  std::vector<int> hours;  // empty: 0..23
  Uncertainty uncertainty;
  std::uint64_t seed = 1;
  SolverOptions solver;

  void validate(const Network& net) const;
};

// Head readings and AMR consumptions of one instant.
struct MeasurementSet {
  Vector heads;    // n_s, m
  Vector demands;  // n_ca, m^3/s, consumption positive

  Vector stacked() const;
};

struct InstantRecord {
  int hour = 0;
  HeadState h_true;
  DemandVector c_true;  // full nodal vector including reservoir inflows
  MeasurementSet measured;
};

struct TimeSeriesData {
  std::vector<InstantRecord> instants;

  const InstantRecord& at_hour(int hour) const;
};

// Hourly steady states of the data-generating network (pipe parameters
// perturbed once, demands perturbed per hour and node, leak added) with
// uniformly bounded measurement noise. Fully determined by spec.seed; the
// leak does not consume random draws, so a leak-free spec with the same seed
// shares every demand and noise realisation.
TimeSeriesData generate(const Network& net, const SensorConfig& sensors, const ScenarioSpec& spec);

// Leak-free state of the unperturbed model at `hour`.
HeadState model_reference_heads(const Network& net, int hour, const SolverOptions& options = {});

std::vector<int> all_hours(int count = 24);
// One hour out of every two: 0, 2, ..., 22.
std::vector<int> every_other_hour(int count = 24);

double rmse(const Vector& h_true, const Vector& h_est);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (N - 1)
  double max = 0.0;
  double min = 0.0;
};

// Throws InputError for empty input.
Summary summarize(std::span<const double> values);

}  // namespace hydrostate
