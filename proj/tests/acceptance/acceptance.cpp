// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.

#include "fixtures.hpp"
#include "oracles.hpp"

#include "hydrostate/config.hpp"
#include "hydrostate/evaluation.hpp"
#include "hydrostate/network_io.hpp"
#include "hydrostate/synthetic.hpp"

#include <Eigen/Dense>

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace hydrostate;
namespace fx = hydrostate::fixture;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

void report(int id, const char* name, const Verdict& v) {
  std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// Oracle suite ---------------------------------------------------------------

struct OracleTally {
  double mass_balance = 0.0;
  double g_consistency = 0.0;
  double kf = 0.0;
  double ut = 0.0;
  double qp = 0.0;
  double constants = 0.0;
  double weights_rel = 0.0;
};

double junction_imbalance(const Network& net, const Conductivity& cond, const HeadState& h, const Vector& d) {
  Vector inflow = Vector::Zero(net.node_count());
  for (Index k = 0; k < net.pipe_count(); ++k) {
    const Pipe& p = net.pipe(k);
    const double dh = h(p.from) - h(p.to);
    const double q = std::copysign(std::pow(cond.sigma(k) * std::abs(dh), 0.54), dh);
    inflow(p.to) += q;
    inflow(p.from) -= q;
  }
  return (inflow.head(net.junction_count()) - d).cwiseAbs().maxCoeff();
}

Verdict oracle_suite() {
  OracleTally t;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z;
  const auto randn = [&](Index r, Index c) {
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
      for (Index j = 0; j < c; ++j) m(i, j) = z(rng);
    }
    return m;
  };

  for (const char* name : {"desk20", "desk80", "modena_sized"}) {
    const fx::Shipped f = fx::shipped(name);
    const Conductivity cond = conductivity(f.net);
    for (const int hour : {0, 8, 19}) {
      const Vector d = f.net.junction_demands(hour);
      const HeadState h = solve_steady_state(f.net, cond, d).h;
      t.mass_balance = std::max(t.mass_balance, junction_imbalance(f.net, cond, h, d));

      // weights: conductivity, the interpolation weights and the refresh
      const WeightPair refreshed = update_weights(f.net, cond, h, gsi_weights(f.net), 5, 5);
      const Matrix O(refreshed.omega);
      std::map<std::pair<Index, Index>, double> expected;
      for (Index k = 0; k < f.net.pipe_count(); ++k) {
        const Pipe& p = f.net.pipe(k);
        const double s = oracle::mp_conductivity(p.roughness, p.diameter, p.length);
        t.weights_rel = std::max(t.weights_rel, std::abs(cond.sigma(k) - s) / s);
        expected[{std::min(p.from, p.to), std::max(p.from, p.to)}] +=
            oracle::mp_aw_weight(s, h(p.from) - h(p.to), kDefaultEpsilonH);
      }
      const Vector w = aw_pipe_weights(f.net, cond, h);
      for (Index k = 0; k < f.net.pipe_count(); ++k) {
        const Pipe& p = f.net.pipe(k);
        const double e = oracle::mp_aw_weight(cond.sigma(k), h(p.from) - h(p.to), kDefaultEpsilonH);
        t.weights_rel = std::max(t.weights_rel, std::abs(w(k) - e) / e);
      }
      for (const auto& [ij, e] : expected) {
        t.weights_rel = std::max(t.weights_rel, std::abs(O(ij.first, ij.second) - e) / e);
      }

      const Vector c = Vector::Constant(f.net.node_count(), 61.7);
      for (const double alpha : {0.0, 0.15, 0.6}) {
        t.constants = std::max(t.constants, (predict_f(c, refreshed, alpha) - c).cwiseAbs().maxCoeff() / 61.7);
      }
      t.constants = std::max(t.constants, (predict_f(c, gsi_weights(f.net), 0.1) - c).cwiseAbs().maxCoeff() / 61.7);
    }

    // measurement function on noiseless data
    ScenarioSpec exact;
    exact.uncertainty = {0.0, 0.0, 0.0, 0.0};
    exact.hours = {2, 8, 14};
    const TimeSeriesData data = generate(f.net, f.sensors, exact);
    const MeasurementModel g(f.net, cond, f.sensors);
    for (const auto& rec : data.instants) {
      t.g_consistency = std::max(t.g_consistency, (g(rec.h_true) - rec.measured.stacked()).cwiseAbs().maxCoeff());
    }

    // interpolation QP residuals
    const Estimator est(f.net, f.sensors, EstimationConfig{});
    ScenarioSpec noisy;
    noisy.hours = {4, 8};
    for (const auto& rec : generate(f.net, f.sensors, noisy).instants) {
      const GsiResult r = est.gsi(rec.measured.heads, model_reference_heads(f.net, rec.hour));
      t.qp = std::max({t.qp, r.residuals.equality, r.residuals.inequality,
                       (est.pressure_selection() * r.h - rec.measured.heads).lpNorm<Eigen::Infinity>()});
    }
  }

  // random dense QPs, residuals recomputed here
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 4 + trial % 9;
    QpProblem qp;
    const Matrix G = randn(n, n);
    qp.H = G * G.transpose() + 0.1 * Matrix::Identity(n, n);
    qp.c = randn(n, 1);
    qp.Aeq = randn(trial % 3, n);
    qp.Ain = randn(2 * n, n);
    const Vector x0 = randn(n, 1);
    qp.beq = qp.Aeq * x0;
    qp.bin = qp.Ain * x0;
    for (Index i = 0; i < qp.bin.size(); ++i) qp.bin(i) += u(rng);
    const QpResult r = solve_qp_active_set(qp, x0, {});
    const Vector slack = qp.Ain * r.x - qp.bin;
    t.qp = std::max({t.qp, std::max(0.0, slack.maxCoeff()),
                     qp.Aeq.rows() ? (qp.Aeq * r.x - qp.beq).lpNorm<Eigen::Infinity>() : 0.0,
                     (qp.H * r.x + qp.c + qp.Aeq.transpose() * r.eq_multipliers + qp.Ain.transpose() * r.ineq_multipliers)
                             .lpNorm<Eigen::Infinity>() /
                         std::max(1.0, qp.c.lpNorm<Eigen::Infinity>())});
  }

  // unscented transform of linear maps: exact to 1e-10 wherever double
  // precision resolves the spread, within the rounding bound at a = 1e-3
  double ut_bound_ratio = 0.0;
  for (const Index n : {3, 12, 40}) {
    const Matrix A = randn(n + 2, n);
    const Vector mean = 40.0 * randn(n, 1);
    const Matrix G = randn(n, n);
    const Matrix P = G * G.transpose() + Matrix::Identity(n, n);
    const Vector ref = A * mean;
    const Matrix cov = A * P * A.transpose();
    const auto map = [&](const Vector& x) { return Vector(A * x); };
    for (const double a : {1.0, 0.5, 0.1}) {
      SigmaParams p;
      p.a = a;
      const UnscentedMoments m = unscented_transform(sigma_points(mean, P, p), map);
      t.ut = std::max({t.ut, (m.mean - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff()),
                       (m.cov - cov).cwiseAbs().maxCoeff() / cov.cwiseAbs().maxCoeff()});
    }
    const SigmaPoints sp = sigma_points(mean, P, SigmaParams{});
    const UnscentedMoments m = unscented_transform(sp, map);
    t.ut = std::max(t.ut, (m.cov - cov).cwiseAbs().maxCoeff() / cov.cwiseAbs().maxCoeff());
    const double bound = static_cast<double>(2 * n) * static_cast<double>(n + 2) *
                         std::numeric_limits<double>::epsilon() * sp.wm(1) *
                         (A.cwiseAbs() * sp.points.cwiseAbs()).maxCoeff();
    ut_bound_ratio = std::max(ut_bound_ratio, (m.mean - ref).cwiseAbs().maxCoeff() / bound);
  }

  // linear measurements with identity prediction against a Kalman filter
  {
    const Network net = fx::five_node();
    const SensorConfig sensors{{4, 0, 2}, {}};
    const MeasurementModel g(net, conductivity(net), sensors);
    const Index n = net.node_count();
    const Matrix C(selection_matrix(n, sensors.pressure_nodes));
    UkfConfig cfg;
    cfg.q_diag = Vector::Constant(n, 0.3);
    cfg.r_diag = Vector::Constant(3, 1e-2);
    cfg.p0_diag = Vector::Ones(n);
    cfg.alpha_blend = 1.0;
    UkfState s;
    s.h = 50.0 * Vector::Ones(n) + randn(n, 1);
    s.P = Vector::LinSpaced(n, 0.5, 2.5).asDiagonal();
    s.weights = gsi_weights(net);
    oracle::KfState kf{s.h, s.P};
    for (int k = 0; k < 10; ++k) {
      const Vector y = 50.0 * Vector::Ones(3) + randn(3, 1);
      s = ukf_step(s, y, cfg, g);
      kf = oracle::linear_kf_step(kf, y, C, Matrix(cfg.r_diag.asDiagonal()), Matrix(cfg.q_diag.asDiagonal()));
      t.kf = std::max({t.kf, (s.h - kf.x).cwiseAbs().maxCoeff(), (s.P - kf.P).cwiseAbs().maxCoeff()});
    }
  }

  const double eps = std::numeric_limits<double>::epsilon();
  Verdict v;
  v.pass = t.mass_balance < 1e-8 && t.g_consistency < 1e-8 && t.kf < 1e-8 && t.ut < 1e-10 && ut_bound_ratio <= 1.0 && t.qp < 1e-9 &&
           t.constants <= 4.0 * eps && t.weights_rel < 1e-12;
  v.detail = fmt(
      "mass balance %.1e m3/s (<1e-8), g vs noiseless %.1e (<1e-8), UKF vs KF %.1e (<1e-8), UT linear %.1e "
      "(<1e-10; a=1e-3 mean at %.2f of rounding bound), QP residual %.1e (<1e-9), constants %.1e (<=4 eps), weights rel %.1e (<1e-12)",
      t.mass_balance, t.g_consistency, t.kf, t.ut, ut_bound_ratio, t.qp, t.constants, t.weights_rel);
  return v;
}

// Desk experiments -------------------------------------------------------------

struct SeedRun {
  std::uint64_t seed = 0;
  Index leak_node = 0;
  int leak_hops = 0;
  Comparison cmp;
  LocalizationComparison loc;
};

struct DeskResults {
  std::vector<SeedRun> runs;
  double seconds = 0.0;
  Network net;
  SensorConfig sensors;
};

DeskResults run_desk(int seeds) {
  const fx::Shipped f = fx::shipped("desk80");
  const EstimationConfig cfg = parse_estimation_config(read_text_file(fx::data_path("desk_config.json")));
  const ScenarioSpec base = parse_scenario_spec(read_text_file(fx::data_path("desk80_scenario.json")), f.net);
  const Estimator est(f.net, f.sensors, cfg);
  const std::vector<Index> remote = remote_junctions(f.net, f.sensors, 3);
  const auto t0 = Clock::now();
  DeskResults out{{}, 0.0, f.net, f.sensors};
  for (int s = 1; s <= seeds; ++s) {
    ScenarioSpec leak = base;
    leak.seed = static_cast<std::uint64_t>(s);
    leak.leak_node = remote[static_cast<std::size_t>(s) % remote.size()];
    ScenarioSpec nominal = leak;
    nominal.leak_node.reset();
    nominal.leak_size = 0.0;
    SeedRun r;
    r.seed = leak.seed;
    r.leak_node = *leak.leak_node;
    std::vector<Index> all_sensors = f.sensors.pressure_nodes;
    all_sensors.insert(all_sensors.end(), f.sensors.amr_nodes.begin(), f.sensors.amr_nodes.end());
    r.leak_hops = hop_distances(f.net, all_sensors)[static_cast<std::size_t>(r.leak_node)];
    r.cmp = compare_methods(est, generate(f.net, f.sensors, leak), generate(f.net, f.sensors, nominal));
    r.loc = compare_localization(f.net, r.cmp, r.leak_node);
    out.runs.push_back(std::move(r));
  }
  out.seconds = seconds_since(t0);
  return out;
}

Verdict method_ordering(const DeskResults& d, int seeds) {
  double sum[3] = {0.0, 0.0, 0.0};
  std::size_t count = 0;
  for (const SeedRun& r : d.runs) {
    for (std::size_t i = 0; i < r.cmp.instants.size(); ++i) {
      sum[0] += r.cmp.of(Method::AwGsi).rmse[i];
      sum[1] += r.cmp.of(Method::UkfGsi).rmse[i];
      sum[2] += r.cmp.of(Method::UkfAwGsi).rmse[i];
      ++count;
    }
  }
  const double aw = sum[0] / static_cast<double>(count);
  const double ug = sum[1] / static_cast<double>(count);
  const double ua = sum[2] / static_cast<double>(count);
  const double reduction = percent_reduction(aw, ua);
  Verdict v;
  v.pass = ua < ug && ug < aw && reduction >= 5.0 && d.seconds < 600.0 && seeds >= 5 &&
           count == static_cast<std::size_t>(12 * seeds);
  v.detail = fmt(
      "desk80, %d seeds x 12 instants: mean RMSE UKF-AW-GSI %.3f < UKF-GSI %.3f < AW-GSI %.3f m, reduction %.1f%% "
      "(>=5%%), %.0f s (<600 s)",
      seeds, ua, ug, aw, reduction, d.seconds);
  return v;
}

Verdict trace_shape(const DeskResults& d, int K_u) {
  const Comparison& cmp = d.runs.front().cmp;
  const InstantEstimates& w = cmp.instants[cmp.worst_instant];
  const auto& t = w.ukf_awgsi.trace;
  int upticks = 0;
  int updates = 0;
  int visible = 0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    if (t[k + 1].rmse > t[k].rmse) ++upticks;
    if (k > 0 && k % static_cast<std::size_t>(K_u) == 0) {
      ++updates;
      if (t[k].rmse - t[k + 1].rmse >= 1e-3 * t[k].rmse) ++visible;
    }
  }
  const double red_gsi = cmp.reduction_ukf_gsi[cmp.worst_instant];
  const double red_aw = cmp.reduction_ukf_awgsi[cmp.worst_instant];
  Verdict v;
  v.pass = t.size() == 51 && upticks <= 3 && 2 * visible >= updates && red_gsi > 0.0 && red_aw > 0.0;
  v.detail = fmt(
      "seed 1 worst instant hour %d: RMSE %.3f -> %.3f m, %d up-ticks (<=3), visible drops at %d/%d refresh points "
      "(>=half), reductions UKF-GSI %.2f%% UKF-AW-GSI %.2f%% (>0)",
      w.hour, t.front().rmse, t.back().rmse, upticks, visible, updates, red_gsi, red_aw);
  return v;
}

Verdict initial_guess(const DeskResults& d, const Estimator& est, const TimeSeriesData& leak) {
  const Comparison& cmp = d.runs.front().cmp;
  const InstantEstimates& w = cmp.instants[cmp.worst_instant];
  const InitialGuessStudy s = initial_guess_study(est, leak.at_hour(w.hour), w.awgsi, w.aw_weights, 1);
  const GuessRun& aw = s.of(GuessMode::AwGsi);
  const GuessRun& zero = s.of(GuessMode::Zero);
  const GuessRun& rnd = s.of(GuessMode::Randomized);
  Verdict v;
  v.pass = zero.rmse_final < zero.rmse_initial && rnd.rmse_final < rnd.rmse_initial &&
           zero.rmse_final > aw.rmse_final && rnd.rmse_final > aw.rmse_final;
  v.detail = fmt("hour %d: zero %.2f -> %.2f m, randomized %.2f -> %.2f m, AW-GSI start %.2f -> %.2f m", w.hour,
                 zero.rmse_initial, zero.rmse_final, rnd.rmse_initial, rnd.rmse_final, aw.rmse_initial,
                 aw.rmse_final);
  return v;
}

Verdict localization(const DeskResults& d) {
  int better = 0;
  int remote_ok = 0;
  std::ostringstream pairs;
  for (const SeedRun& r : d.runs) {
    const Index a = *r.loc.over_ranked_awgsi;
    const Index u = *r.loc.over_ranked_ukf_awgsi;
    better += u <= a;
    remote_ok += r.leak_hops >= 3;
    pairs << ' ' << d.net.node(r.leak_node).id << ':' << a << "->" << u;
  }
  const int n = static_cast<int>(d.runs.size());
  Verdict v;
  v.pass = n >= 10 && remote_ok == n && better >= 7;
  v.detail = fmt("over-ranked UKF-AW-GSI <= AW-GSI in %d/%d scenarios (>=7/10), leaks >=3 hops from sensors in %d/%d;",
                 better, n, remote_ok, n) +
             pairs.str();
  return v;
}

Verdict scale_check() {
  const fx::Shipped f = fx::shipped("modena_sized");
  const EstimationConfig cfg = parse_estimation_config(read_text_file(fx::data_path("reference_config.json")));
  ScenarioSpec spec;
  spec.hours = {8};
  ScenarioSpec leak = spec;
  leak.leak_node = remote_junctions(f.net, f.sensors, 3).front();
  leak.leak_size = kReferenceLeakSize;
  const TimeSeriesData nominal = generate(f.net, f.sensors, spec);
  const TimeSeriesData leaky = generate(f.net, f.sensors, leak);
  const auto t0 = Clock::now();
  const Estimator est(f.net, f.sensors, cfg);
  const HeadState h_nom = nominal_estimate(est, nominal.at_hour(8), model_reference_heads(f.net, 8));
  const InstantRecord& rec = leaky.at_hour(8);
  const AwGsiResult aw = est.awgsi(h_nom, rec.measured.heads);
  const UkfRun run = est.ukf_awgsi(aw.h0, rec.measured.stacked(), aw.weights, &rec.h_true);
  const double secs = seconds_since(t0);
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  const double peak_mb = static_cast<double>(usage.ru_maxrss) / 1024.0;
  Verdict v;
  v.pass = run.trace.size() == 51 && secs < 60.0 && peak_mb < 1024.0;
  v.detail = fmt("%ld nodes, %ld pipes, K=%d: %.2f s (<60 s), peak RSS %.0f MB (<1024 MB), RMSE %.3f -> %.3f m",
                 static_cast<long>(f.net.node_count()), static_cast<long>(f.net.pipe_count()), cfg.K, secs, peak_mb,
                 run.trace.front().rmse, run.trace.back().rmse);
  return v;
}

}  // namespace

int main() {
  bool all = true;
  const Verdict oracles = oracle_suite();

  Verdict v1, v2, v3, v4;
  if (oracles.pass) {
    constexpr int kSeeds = 10;
    const DeskResults desk = run_desk(kSeeds);
    const EstimationConfig cfg = parse_estimation_config(read_text_file(fx::data_path("desk_config.json")));
    v1 = method_ordering(desk, kSeeds);
    v2 = trace_shape(desk, cfg.K_u);
    const Estimator est(desk.net, desk.sensors, cfg);
    ScenarioSpec leak = parse_scenario_spec(read_text_file(fx::data_path("desk80_scenario.json")), desk.net);
    leak.seed = desk.runs.front().seed;
    leak.leak_node = desk.runs.front().leak_node;
    v3 = initial_guess(desk, est, generate(desk.net, desk.sensors, leak));
    v4 = localization(desk);
  } else {
    v1.detail = v2.detail = v3.detail = v4.detail = "not attempted, oracle suite failed";
  }
  report(1, "method ordering", v1);
  report(2, "RMSE trace", v2);
  report(3, "initial guess", v3);
  report(4, "localization", v4);
  report(5, "oracle suite", oracles);
  const Verdict v6 = scale_check();
  report(6, "scale check", v6);
  for (const Verdict* v : std::initializer_list<const Verdict*>{&v1, &v2, &v3, &v4, &oracles, &v6}) all = all && v->pass;
  return all ? 0 : 1;
}
