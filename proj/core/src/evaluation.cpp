#include "hydrostate/evaluation.hpp"

#include "hydrostate/error.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace hydrostate {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Gsi: return "gsi";
    case Method::AwGsi: return "awgsi";
    case Method::UkfGsi: return "ukf-gsi";
    case Method::UkfAwGsi: return "ukf-awgsi";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (const Method m : {Method::Gsi, Method::AwGsi, Method::UkfGsi, Method::UkfAwGsi}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

Estimator::Estimator(Network net, SensorConfig sensors, const EstimationConfig& cfg)
    : net_(std::move(net)),
      sensors_(std::move(sensors)),
      cfg_(cfg),
      cond_(hydrostate::conductivity(net_)),
      g_(net_, cond_, sensors_),
      S_(selection_matrix(net_.node_count(), sensors_.pressure_nodes)),
      gsi_weights_(hydrostate::gsi_weights(net_)),
      gsi_Ld_(laplacian_based(gsi_weights_)) {
  ukf_ = cfg_.ukf_config(net_.node_count(), sensors_.pressure_count(), sensors_.amr_count());
}

GsiResult Estimator::gsi(const Vector& hs, const HeadState& h_ref) const {
  GsiProblem p;
  p.Ld = gsi_Ld_;
  p.S = S_;
  p.hs = hs;
  p.Bhat = -build_incidence(net_, h_ref);
  p.gamma_weight = cfg_.gamma_weight;
  return gsi_estimate(p);
}

AwGsiResult Estimator::awgsi(const HeadState& h_nominal_estimate, const Vector& hs) const {
  return awgsi_heads(net_, cond_, h_nominal_estimate, S_, hs, cfg_.epsilon_h);
}

UkfRun Estimator::ukf_gsi(const HeadState& h0, const Vector& y, const HeadState* truth) const {
  return run_ukf_gsi(h0, y, ukf_, gsi_weights_, g_, truth);
}

UkfRun Estimator::ukf_awgsi(const HeadState& h0, const Vector& y, const WeightPair& w0,
                            const HeadState* truth) const {
  return run_ukf_awgsi(net_, cond_, h0, y, ukf_, w0, g_, truth);
}

WeightPair Estimator::aw_weights_at(const HeadState& h_ref) const {
  return aw_weights(net_, cond_, h_ref, cfg_.epsilon_h);
}

HeadState nominal_estimate(const Estimator& est, const InstantRecord& nominal, const HeadState& model_heads) {
  return est.gsi(nominal.measured.heads, model_heads).h;
}

const MethodSummary& Comparison::of(Method m) const {
  for (const auto& s : methods) {
    if (s.method == m) return s;
  }
  throw InputError("comparison has no results for " + std::string(method_name(m)));
}

double percent_reduction(double baseline, double value) { return 100.0 * (baseline - value) / baseline; }

namespace {

InstantEstimates estimate_instant(const Estimator& est, const InstantRecord& leak, const InstantRecord& nominal,
                                  bool nominal_run) {
  InstantEstimates out;
  out.hour = leak.hour;
  out.truth = leak.h_true;
  const HeadState model = model_reference_heads(est.network(), leak.hour);
  out.nominal_gsi = nominal_estimate(est, nominal, model);
  AwGsiResult aw = est.awgsi(out.nominal_gsi, leak.measured.heads);
  out.awgsi = std::move(aw.h0);
  out.aw_weights = std::move(aw.weights);
  const Vector y = leak.measured.stacked();
  out.ukf_gsi = est.ukf_gsi(out.awgsi, y, &leak.h_true);
  out.ukf_awgsi = est.ukf_awgsi(out.awgsi, y, out.aw_weights, &leak.h_true);
  // Both scenarios start from the weights of the same leak-free reference.
  if (nominal_run) {
    out.ukf_awgsi_nominal =
        est.ukf_awgsi(out.nominal_gsi, nominal.measured.stacked(), out.aw_weights, &nominal.h_true);
  }
  return out;
}

template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

Comparison compare_methods(const Estimator& est, const TimeSeriesData& leak, const TimeSeriesData& nominal,
                           const CompareOptions& options) {
  std::vector<const InstantRecord*> selected;
  if (options.hours.empty()) {
    for (const auto& r : leak.instants) selected.push_back(&r);
  } else {
    for (const int h : options.hours) selected.push_back(&leak.at_hour(h));
  }
  if (selected.empty()) throw InputError("compare_methods: no instants selected");

  Comparison cmp;
  cmp.instants.resize(selected.size());
  parallel_for(selected.size(), options.jobs, [&](std::size_t i) {
    cmp.instants[i] = estimate_instant(est, *selected[i], nominal.at_hour(selected[i]->hour), options.nominal_runs);
  });

  MethodSummary aw{Method::AwGsi, {}, {}};
  MethodSummary ug{Method::UkfGsi, {}, {}};
  MethodSummary ua{Method::UkfAwGsi, {}, {}};
  for (const auto& e : cmp.instants) {
    aw.rmse.push_back(rmse(e.truth, e.awgsi));
    ug.rmse.push_back(rmse(e.truth, e.ukf_gsi.h));
    ua.rmse.push_back(rmse(e.truth, e.ukf_awgsi.h));
    cmp.reduction_ukf_gsi.push_back(percent_reduction(aw.rmse.back(), ug.rmse.back()));
    cmp.reduction_ukf_awgsi.push_back(percent_reduction(aw.rmse.back(), ua.rmse.back()));
  }
  cmp.worst_instant =
      static_cast<std::size_t>(std::max_element(aw.rmse.begin(), aw.rmse.end()) - aw.rmse.begin());
  for (auto* s : {&aw, &ug, &ua}) {
    s->summary = summarize(s->rmse);
    cmp.methods.push_back(std::move(*s));
  }
  return cmp;
}

std::string_view guess_mode_name(GuessMode m) {
  switch (m) {
    case GuessMode::AwGsi: return "awgsi";
    case GuessMode::Zero: return "zero";
    case GuessMode::Randomized: return "randomized";
  }
  return "unknown";
}

const GuessRun& InitialGuessStudy::of(GuessMode m) const {
  for (const auto& r : runs) {
    if (r.mode == m) return r;
  }
  throw InputError("initial-guess study has no " + std::string(guess_mode_name(m)) + " run");
}

HeadState randomized_guess(const HeadState& h_aw, std::uint64_t seed) {
  const std::vector<double> values(h_aw.data(), h_aw.data() + h_aw.size());
  const Summary s = summarize(values);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  HeadState h(h_aw.size());
  for (Index i = 0; i < h.size(); ++i) h(i) = s.mean + s.std * unit(rng);
  return h;
}

InitialGuessStudy initial_guess_study(const Estimator& est, const InstantRecord& leak, const HeadState& h_awgsi,
                                      const WeightPair& w0, std::uint64_t seed) {
  InitialGuessStudy study;
  study.hour = leak.hour;
  study.seed = seed;
  const Vector y = leak.measured.stacked();
  const std::pair<GuessMode, HeadState> guesses[] = {
      {GuessMode::AwGsi, h_awgsi},
      {GuessMode::Zero, HeadState::Zero(h_awgsi.size())},
      {GuessMode::Randomized, randomized_guess(h_awgsi, seed)},
  };
  for (const auto& [mode, h0] : guesses) {
    GuessRun r{mode, 0.0, 0.0, est.ukf_awgsi(h0, y, w0, &leak.h_true)};
    r.rmse_initial = r.run.trace.front().rmse;
    r.rmse_final = r.run.trace.back().rmse;
    study.runs.push_back(std::move(r));
  }
  return study;
}

LocalizationComparison compare_localization(const Network& net, const Comparison& cmp,
                                            std::optional<Index> leak_node) {
  std::vector<HeadState> nom_aw, leak_aw, nom_ukf, leak_ukf;
  for (const auto& e : cmp.instants) {
    if (!e.ukf_awgsi_nominal) throw InputError("localization needs nominal-scenario UKF runs");
    nom_aw.push_back(e.nominal_gsi);
    leak_aw.push_back(e.awgsi);
    nom_ukf.push_back(e.ukf_awgsi_nominal->h);
    leak_ukf.push_back(e.ukf_awgsi.h);
  }
  LocalizationComparison loc;
  loc.awgsi = lcsm_score(nom_aw, leak_aw);
  loc.ukf_awgsi = lcsm_score(nom_ukf, leak_ukf);
  loc.leak_node = leak_node;
  if (leak_node) {
    const auto adj = net.adjacency();
    loc.over_ranked_awgsi = over_ranked_count(loc.awgsi, *leak_node, adj);
    loc.over_ranked_ukf_awgsi = over_ranked_count(loc.ukf_awgsi, *leak_node, adj);
  }
  return loc;
}

}  // namespace hydrostate
