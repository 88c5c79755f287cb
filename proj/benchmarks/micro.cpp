#include "hydrostate/evaluation.hpp"
#include "hydrostate/network_io.hpp"
#include "hydrostate/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <string>

using namespace hydrostate;

namespace {

struct Shipped {
  Network net;
  SensorConfig sensors;
};

Shipped load(const std::string& network, const std::string& sensors) {
  const std::string dir = HYDROSTATE_BENCH_DATA_DIR;
  Network net = load_network(dir + "/" + network).network;
  SensorConfig s = load_sensors(dir + "/" + sensors, net);
  return {std::move(net), std::move(s)};
}

const Shipped& network_for(int which) {
  static const Shipped desk = load("desk80.inp", "desk80_sensors.json");
  static const Shipped large = load("modena_sized.inp", "modena_sized_sensors.json");
  return which == 0 ? desk : large;
}

// One leak instant at hour 8 with its AW-GSI initial guess.
struct Instant {
  Estimator est;
  InstantRecord rec;
  AwGsiResult aw;
  HeadState model;
};

Instant make_instant(int which) {
  const Shipped& s = network_for(which);
  Estimator est(s.net, s.sensors, EstimationConfig{});
  ScenarioSpec spec;
  spec.hours = {8};
  const TimeSeriesData nominal = generate(s.net, s.sensors, spec);
  spec.leak_node = remote_junctions(s.net, s.sensors, 3).front();
  spec.leak_size = kReferenceLeakSize;
  InstantRecord rec = generate(s.net, s.sensors, spec).instants.front();
  const HeadState model = model_reference_heads(s.net, 8);
  const HeadState h_nom = nominal_estimate(est, nominal.instants.front(), model);
  AwGsiResult aw = est.awgsi(h_nom, rec.measured.heads);
  return {std::move(est), std::move(rec), std::move(aw), model};
}

void BM_SteadyState(benchmark::State& state) {
  const Shipped& s = network_for(static_cast<int>(state.range(0)));
  const Conductivity cond = conductivity(s.net);
  const Vector d = s.net.junction_demands(8);
  for (auto _ : state) benchmark::DoNotOptimize(solve_steady_state(s.net, cond, d).h);
}
BENCHMARK(BM_SteadyState)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MeasurementFunction(benchmark::State& state) {
  const Instant in = make_instant(static_cast<int>(state.range(0)));
  const MeasurementModel& g = in.est.measurement_model();
  for (auto _ : state) benchmark::DoNotOptimize(g(in.aw.h0));
}
BENCHMARK(BM_MeasurementFunction)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Gsi(benchmark::State& state) {
  const Instant in = make_instant(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(in.est.gsi(in.rec.measured.heads, in.model).h);
}
BENCHMARK(BM_Gsi)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_UkfStep(benchmark::State& state) {
  const Instant in = make_instant(static_cast<int>(state.range(0)));
  const UkfConfig& cfg = in.est.ukf_config();
  UkfState s;
  s.h = in.aw.h0;
  s.P = cfg.p0_diag.asDiagonal();
  s.weights = in.aw.weights;
  const Vector y = in.rec.measured.stacked();
  for (auto _ : state) benchmark::DoNotOptimize(ukf_step(s, y, cfg, in.est.measurement_model()).h);
}
BENCHMARK(BM_UkfStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_UkfAwGsiInstant(benchmark::State& state) {
  const Instant in = make_instant(static_cast<int>(state.range(0)));
  const Vector y = in.rec.measured.stacked();
  for (auto _ : state) benchmark::DoNotOptimize(in.est.ukf_awgsi(in.aw.h0, y, in.aw.weights).h);
}
BENCHMARK(BM_UkfAwGsiInstant)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
