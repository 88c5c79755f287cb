#pragma once

#include "hydrostate/config.hpp"
#include "hydrostate/hydraulics.hpp"
#include "hydrostate/interpolation.hpp"
#include "hydrostate/localization.hpp"
#include "hydrostate/network.hpp"
#include "hydrostate/scenario.hpp"
#include "hydrostate/ukf.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hydrostate {

enum class Method { Gsi, AwGsi, UkfGsi, UkfAwGsi };

std::string_view method_name(Method m);  // gsi, awgsi, ukf-gsi, ukf-awgsi
std::optional<Method> parse_method(std::string_view name);

// Model, sensors and settings shared by every estimator run. Immutable after
// construction, so one instance serves concurrent instants.
class Estimator {
 public:
  Estimator(Network net, SensorConfig sensors, const EstimationConfig& cfg);

  const Network& network() const { return net_; }
  const SensorConfig& sensors() const { return sensors_; }
  const EstimationConfig& config() const { return cfg_; }
  const UkfConfig& ukf_config() const { return ukf_; }
  const Conductivity& conductivity() const { return cond_; }
  const MeasurementModel& measurement_model() const { return g_; }
  const SparseMatrix& pressure_selection() const { return S_; }

  // GSI with flow-direction constraints taken from `h_ref`.
  GsiResult gsi(const Vector& hs, const HeadState& h_ref) const;
  AwGsiResult awgsi(const HeadState& h_nominal_estimate, const Vector& hs) const;
  UkfRun ukf_gsi(const HeadState& h0, const Vector& y, const HeadState* truth = nullptr) const;
  // Omega^[0] = w0, normally the weights of the AW-GSI run that produced h0.
  UkfRun ukf_awgsi(const HeadState& h0, const Vector& y, const WeightPair& w0,
                   const HeadState* truth = nullptr) const;
  WeightPair aw_weights_at(const HeadState& h_ref) const;

 private:
  Network net_;
  SensorConfig sensors_;
  EstimationConfig cfg_;
  UkfConfig ukf_;
  Conductivity cond_;
  MeasurementModel g_;
  SparseMatrix S_;
  WeightPair gsi_weights_;
  SparseMatrix gsi_Ld_;
};

// Leak-free reference estimate of one instant: GSI on the nominal readings
// with the flow directions of the unperturbed model at that hour.
HeadState nominal_estimate(const Estimator& est, const InstantRecord& nominal, const HeadState& model_heads);

struct InstantEstimates {
  int hour = 0;
  HeadState truth;
  HeadState nominal_gsi;  // leak-free reference
  HeadState awgsi;        // baseline, and the UKF initial guess
  WeightPair aw_weights;  // weights of the AW-GSI run, Omega^[0] of UKF-AW-GSI
  UkfRun ukf_gsi;
  UkfRun ukf_awgsi;
  std::optional<UkfRun> ukf_awgsi_nominal;  // nominal-scenario run for localization
};

struct CompareOptions {
  std::vector<int> hours;  // empty: every instant present in the leak data
  int jobs = 1;
  bool nominal_runs = true;
};

struct MethodSummary {
  Method method;
  std::vector<double> rmse;  // per instant
  Summary summary;
};

struct Comparison {
  std::vector<InstantEstimates> instants;
  std::vector<MethodSummary> methods;  // AW-GSI, UKF-GSI, UKF-AW-GSI
  // Per instant, percentage RMSE reduction of the UKF methods vs AW-GSI.
  std::vector<double> reduction_ukf_gsi;
  std::vector<double> reduction_ukf_awgsi;
  std::size_t worst_instant = 0;  // largest AW-GSI RMSE

  const MethodSummary& of(Method m) const;
};

// Runs AW-GSI, UKF-GSI and UKF-AW-GSI on each selected instant. Instants are
// distributed over `jobs` threads; results do not depend on the count.
Comparison compare_methods(const Estimator& est, const TimeSeriesData& leak, const TimeSeriesData& nominal,
                           const CompareOptions& options = {});

double percent_reduction(double baseline, double value);

enum class GuessMode { AwGsi, Zero, Randomized };
std::string_view guess_mode_name(GuessMode m);

struct GuessRun {
  GuessMode mode;
  double rmse_initial = 0.0;
  double rmse_final = 0.0;
  UkfRun run;
};

struct InitialGuessStudy {
  int hour = 0;
  std::uint64_t seed = 0;
  std::vector<GuessRun> runs;

  const GuessRun& of(GuessMode m) const;
};

// Randomized initial guess mean(h_aw) + std(h_aw) x, x ~ U[-1, 1]^n.
HeadState randomized_guess(const HeadState& h_aw, std::uint64_t seed);

// UKF-AW-GSI runs on one instant differing only in h0.
InitialGuessStudy initial_guess_study(const Estimator& est, const InstantRecord& leak, const HeadState& h_awgsi,
                                      const WeightPair& w0, std::uint64_t seed);

struct LocalizationComparison {
  LeakScore awgsi;
  LeakScore ukf_awgsi;
  std::optional<Index> leak_node;
  std::optional<Index> over_ranked_awgsi;
  std::optional<Index> over_ranked_ukf_awgsi;
};

// Throws InputError when the comparison lacks nominal UKF runs.
LocalizationComparison compare_localization(const Network& net, const Comparison& cmp,
                                            std::optional<Index> leak_node);

// CSV and JSON renderings of the results.
std::string traces_csv(const Comparison& cmp);
std::string summary_csv(const Comparison& cmp);
std::string rmse_csv(const Comparison& cmp);
std::string reductions_csv(const Comparison& cmp);
std::string initial_guess_csv(const InitialGuessStudy& study);
std::string localization_json(const LocalizationComparison& loc, const Network& net);

// Recomputes summary statistics from rmse_csv output.
std::vector<MethodSummary> summaries_from_rmse_csv(std::string_view csv);

}  // namespace hydrostate
