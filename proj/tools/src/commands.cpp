#include "cli.hpp"
#include "commands_detail.hpp"

#include "hydrostate/config.hpp"
#include "hydrostate/error.hpp"
#include "hydrostate/evaluation.hpp"
#include "hydrostate/localization.hpp"
#include "hydrostate/network_io.hpp"
#include "hydrostate/scenario_io.hpp"
#include "hydrostate/synthetic.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace hydrostate::cli {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct Bundle {
  Network net;
  SensorConfig sensors;
  ScenarioSpec spec;
  TimeSeriesData leak;
  TimeSeriesData nominal;
};

Bundle load_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("data directory not found: " + dir.string());
  Network net = load_network(dir / "network.json").network;
  SensorConfig sensors = load_sensors(dir / "sensors.json", net);
  ScenarioSpec spec = parse_scenario_spec(read_text_file(dir / "scenario.json"), net);
  TimeSeriesData leak = read_time_series(dir / "leak", net, sensors);
  TimeSeriesData nominal = read_time_series(dir / "nominal", net, sensors);
  return {std::move(net), std::move(sensors), std::move(spec), std::move(leak), std::move(nominal)};
}

std::vector<int> hours_of(const TimeSeriesData& data) {
  std::vector<int> out;
  for (const auto& r : data.instants) out.push_back(r.hour);
  return out;
}

std::string absolute_string(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

ojson parse_json(std::string_view text, const std::string& what) {
  try {
    return ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(what + ": " + e.what(), 1);
  }
}

EstimationConfig load_config(const fs::path& explicit_path, const fs::path& fallback, std::string* text_out) {
  fs::path path = explicit_path;
  if (path.empty() && !fallback.empty() && fs::exists(fallback)) path = fallback;
  if (path.empty()) {
    const EstimationConfig cfg;
    *text_out = serialize_estimation_config(cfg);
    return cfg;
  }
  *text_out = read_text_file(path);
  return parse_estimation_config(*text_out);
}

void write_json(const fs::path& path, const ojson& doc) { write_text_file(path, doc.dump(2) + "\n"); }

void print_summary(std::ostream& out, const Comparison& cmp) {
  out << std::left << std::setw(12) << "method" << std::right << std::setw(22) << "mean +- std (m)" << std::setw(10)
      << "max" << std::setw(10) << "min" << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& s : cmp.methods) {
    std::ostringstream ms;
    ms << std::fixed << std::setprecision(4) << s.summary.mean << " +- " << s.summary.std;
    out << std::left << std::setw(12) << method_name(s.method) << std::right << std::setw(22) << ms.str()
        << std::setw(10) << s.summary.max << std::setw(10) << s.summary.min << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

}  // namespace

std::vector<int> select_hours(const std::string& spec, const std::vector<int>& available) {
  if (spec.empty() || spec == "all") return available;
  if (spec == "every-other") {
    std::vector<int> out;
    for (const int h : every_other_hour()) {
      if (std::find(available.begin(), available.end(), h) != available.end()) out.push_back(h);
    }
    if (out.empty()) throw UsageError("no even hours in the data");
    return out;
  }
  std::vector<int> out;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    int h = 0;
    try {
      std::size_t used = 0;
      h = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("invalid hour '" + item + "'");
    }
    if (std::find(available.begin(), available.end(), h) == available.end()) {
      throw UsageError("hour " + std::to_string(h) + " not in the data");
    }
    out.push_back(h);
  }
  if (out.empty()) throw UsageError("empty hour list");
  return out;
}

void make_network(const MakeNetworkOptions& o, std::ostream& out) {
  SyntheticNetworkSpec spec;
  if (o.modena_sized) {
    spec = modena_sized_spec();
  } else {
    spec.junctions = o.junctions;
    spec.reservoirs = o.reservoirs;
    spec.pipes = o.pipes;
    spec.total_demand = o.demand_lps / kLitresPerCubicMetre;
    spec.spacing = o.spacing_m;
    spec.seed = o.seed;
  }
  const Network net = make_synthetic_network(spec);
  const auto format = o.out.extension() == ".inp" ? NetworkFormat::Inp : NetworkFormat::Json;
  write_text_file(o.out, serialize_network(net, format));
  out << "network: " << net.junction_count() << " junctions, " << net.reservoir_count() << " reservoirs, "
      << net.pipe_count() << " pipes -> " << o.out.string() << '\n';
  if (!o.sensors_out.empty()) {
    const SensorConfig s = place_sensors(net, o.pressure_junctions, o.extra_amr);
    write_text_file(o.sensors_out, serialize_sensors(s, net));
    out << "sensors: " << s.pressure_count() << " pressure, " << s.amr_count() << " AMR -> " << o.sensors_out.string()
        << '\n';
  }
}

namespace detail {

ojson generate_bundle(const fs::path& network_path, const fs::path& sensors_path, std::string_view scenario_text,
                      const fs::path& out_dir, std::ostream& out) {
  const std::string network_text = read_text_file(network_path);
  auto parsed = parse_network(network_text, network_path.extension() == ".inp" ? NetworkFormat::Inp
                                                                                 : NetworkFormat::Json);
  for (const auto& w : parsed.warnings) out << "warning: " << w << '\n';
  const Network& net = parsed.network;
  const std::string sensors_text = read_text_file(sensors_path);
  const SensorConfig sensors = parse_sensors(sensors_text, net);
  const ScenarioSpec spec = parse_scenario_spec(scenario_text, net);
  ScenarioSpec nominal_spec = spec;
  nominal_spec.leak_node.reset();
  nominal_spec.leak_size = 0.0;

  const TimeSeriesData leak = hydrostate::generate(net, sensors, spec);
  const TimeSeriesData nominal = hydrostate::generate(net, sensors, nominal_spec);

  write_text_file(out_dir / "network.json", serialize_network(net, NetworkFormat::Json));
  write_text_file(out_dir / "sensors.json", serialize_sensors(sensors, net));
  write_text_file(out_dir / "scenario.json", serialize_scenario_spec(spec, net));
  write_time_series(out_dir / "leak", leak, net, sensors);
  write_time_series(out_dir / "nominal", nominal, net, sensors);

  ojson manifest;
  manifest["tool"] = "hydrostate";
  manifest["version"] = kToolVersion;
  manifest["command"] = "generate";
  manifest["network"] = absolute_string(network_path);
  manifest["network_hash"] = content_hash(network_text);
  manifest["sensors"] = absolute_string(sensors_path);
  manifest["sensors_hash"] = content_hash(sensors_text);
  manifest["scenario"] = parse_json(serialize_scenario_spec(spec, net), "scenario");
  manifest["scenario_hash"] = content_hash(scenario_text);
  manifest["seed"] = spec.seed;
  write_json(out_dir / "manifest.json", manifest);
  out << "generated " << leak.instants.size() << " instants (seed " << spec.seed << ") -> " << out_dir.string()
      << '\n';
  return manifest;
}

ojson evaluate_run(const EvaluateOptions& o, std::ostream& out) {
  const Bundle b = load_bundle(o.data);
  std::string config_text;
  const EstimationConfig cfg = load_config(o.config, o.data / "config.json", &config_text);
  const Estimator est(b.net, b.sensors, cfg);

  CompareOptions co;
  co.hours = select_hours(o.hours, hours_of(b.leak));
  co.jobs = o.jobs;
  const Comparison cmp = compare_methods(est, b.leak, b.nominal, co);
  const InstantEstimates& worst = cmp.instants[cmp.worst_instant];
  const InitialGuessStudy study =
      initial_guess_study(est, b.leak.at_hour(worst.hour), worst.awgsi, worst.aw_weights, o.guess_seed);
  const LocalizationComparison loc = compare_localization(b.net, cmp, b.spec.leak_node);

  write_text_file(o.out / "traces.csv", traces_csv(cmp));
  write_text_file(o.out / "summary.csv", summary_csv(cmp));
  write_text_file(o.out / "rmse.csv", rmse_csv(cmp));
  write_text_file(o.out / "reductions.csv", reductions_csv(cmp));
  write_text_file(o.out / "initial_guess.csv", initial_guess_csv(study));
  write_text_file(o.out / "localization_ranking.csv", ranking_csv(loc.ukf_awgsi, b.net));
  write_text_file(o.out / "localization_ranking_awgsi.csv", ranking_csv(loc.awgsi, b.net));
  write_text_file(o.out / "colormap.json", colormap_json(loc.ukf_awgsi, b.net));
  write_text_file(o.out / "colormap_awgsi.json", colormap_json(loc.awgsi, b.net));
  write_text_file(o.out / "localization.json", localization_json(loc, b.net));

  ojson manifest;
  manifest["tool"] = "hydrostate";
  manifest["version"] = kToolVersion;
  manifest["command"] = "evaluate";
  manifest["data"] = absolute_string(o.data);
  manifest["data_manifest_hash"] =
      fs::exists(o.data / "manifest.json") ? content_hash(read_text_file(o.data / "manifest.json")) : "";
  manifest["config"] = parse_json(serialize_estimation_config(cfg), "config");
  manifest["config_hash"] = content_hash(config_text);
  manifest["hours"] = co.hours;
  manifest["guess_seed"] = o.guess_seed;
  manifest["seed"] = b.spec.seed;
  manifest["worst_hour"] = worst.hour;
  write_json(o.out / "manifest.json", manifest);

  print_summary(out, cmp);
  out << "worst AW-GSI instant: hour " << worst.hour << ", reductions ukf-gsi "
      << fixed2(cmp.reduction_ukf_gsi[cmp.worst_instant]) << "%, ukf-awgsi "
      << fixed2(cmp.reduction_ukf_awgsi[cmp.worst_instant]) << "%\n";
  if (loc.leak_node) {
    out << "over-ranked nodes: awgsi " << *loc.over_ranked_awgsi << ", ukf-awgsi " << *loc.over_ranked_ukf_awgsi
        << '\n';
  }
  return manifest;
}

std::string fixed2(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

std::string number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

void generate(const GenerateOptions& o, std::ostream& out) {
  detail::generate_bundle(o.network, o.sensors, read_text_file(o.spec), o.out, out);
}

void estimate(const EstimateOptions& o, std::ostream& out) {
  const auto method = parse_method(o.method);
  if (!method) throw UsageError("unknown method '" + o.method + "'");
  if (o.scenario != "leak" && o.scenario != "nominal") throw UsageError("scenario must be leak or nominal");
  const Bundle b = load_bundle(o.data);
  if (!o.sensors.empty() && load_sensors(o.sensors, b.net) != b.sensors) {
    throw InputError("sensor file does not match the data bundle");
  }
  const std::string config_text = read_text_file(o.config);
  const EstimationConfig cfg = parse_estimation_config(config_text);
  const Estimator est(b.net, b.sensors, cfg);
  const TimeSeriesData& data = o.scenario == "leak" ? b.leak : b.nominal;
  const std::vector<int> hours = select_hours(o.hours, hours_of(data));

  std::map<int, Vector> init;
  if (!o.init.empty()) {
    const HourTable t = parse_hour_table(read_text_file(o.init / "estimates.csv"));
    const auto rows = node_rows(t, b.net);
    for (std::size_t i = 0; i < rows.size(); ++i) init.emplace(t.hours[i], rows[i]);
  }
  const bool ukf = *method == Method::UkfGsi || *method == Method::UkfAwGsi;
  if (!ukf && !o.init.empty()) throw UsageError("--init applies to the UKF methods only");

  std::vector<Vector> estimates;
  std::ostringstream rmse_out, trace_out;
  rmse_out << "hour,rmse\n";
  trace_out << "hour,k,rmse,innovation_norm,trace_p,weights_updated\n";
  double sum = 0.0;
  for (const int hour : hours) {
    const InstantRecord& rec = data.at_hour(hour);
    const HeadState model = model_reference_heads(b.net, hour);
    HeadState h;
    if (*method == Method::Gsi) {
      h = est.gsi(rec.measured.heads, model).h;
    } else {
      const HeadState h_nom = nominal_estimate(est, b.nominal.at_hour(hour), model);
      const AwGsiResult aw = est.awgsi(h_nom, rec.measured.heads);
      if (!ukf) {
        h = aw.h0;
      } else {
        HeadState h0 = aw.h0;
        if (!o.init.empty()) {
          const auto it = init.find(hour);
          if (it == init.end()) throw InputError("initial estimate lacks hour " + std::to_string(hour));
          h0 = it->second;
        }
        const Vector y = rec.measured.stacked();
        const UkfRun run = *method == Method::UkfGsi ? est.ukf_gsi(h0, y, &rec.h_true)
                                                     : est.ukf_awgsi(h0, y, aw.weights, &rec.h_true);
        for (const auto& r : run.trace) {
          trace_out << hour << ',' << r.k << ',' << detail::number(r.rmse) << ',';
          if (r.k > 0) trace_out << detail::number(r.innovation_norm);
          trace_out << ',' << detail::number(r.trace_p) << ',' << (r.weights_updated ? 1 : 0) << '\n';
        }
        h = run.h;
      }
    }
    const double e = rmse(rec.h_true, h);
    sum += e;
    rmse_out << hour << ',' << detail::number(e) << '\n';
    estimates.push_back(std::move(h));
  }

  write_text_file(o.out / "estimates.csv", hour_table_csv(node_table(b.net, hours, estimates)));
  write_text_file(o.out / "rmse.csv", rmse_out.str());
  if (ukf) write_text_file(o.out / "traces.csv", trace_out.str());

  ojson manifest;
  manifest["tool"] = "hydrostate";
  manifest["version"] = kToolVersion;
  manifest["command"] = "estimate";
  manifest["method"] = method_name(*method);
  manifest["scenario"] = o.scenario;
  manifest["data"] = absolute_string(o.data);
  manifest["init"] = o.init.empty() ? ojson(nullptr) : ojson(absolute_string(o.init));
  manifest["config"] = parse_json(serialize_estimation_config(cfg), "config");
  manifest["config_hash"] = content_hash(config_text);
  manifest["hours"] = hours;
  manifest["seed"] = b.spec.seed;
  write_json(o.out / "manifest.json", manifest);
  out << method_name(*method) << " (" << o.scenario << "): " << hours.size() << " instants, mean RMSE "
      << detail::fixed2(sum / static_cast<double>(hours.size())) << " m -> " << o.out.string() << '\n';
}

void localize(const LocalizeOptions& o, std::ostream& out) {
  fs::path network_path = o.network;
  if (network_path.empty()) {
    const ojson m = parse_json(read_text_file(o.leak / "manifest.json"), "manifest");
    if (!m.contains("data")) throw InputError("leak estimate manifest names no data directory; pass --network");
    network_path = fs::path(m["data"].get<std::string>()) / "network.json";
  }
  const Network net = load_network(network_path).network;
  const HourTable nom = parse_hour_table(read_text_file(o.nom / "estimates.csv"));
  const HourTable leak = parse_hour_table(read_text_file(o.leak / "estimates.csv"));
  if (nom.hours != leak.hours) throw InputError("leak and leak-free estimates cover different hours");
  const LeakScore score = lcsm_score(node_rows(nom, net), node_rows(leak, net));
  write_text_file(o.out / "localization_ranking.csv", ranking_csv(score, net));
  write_text_file(o.out / "colormap.json", colormap_json(score, net));

  ojson summary;
  summary["nominal"] = absolute_string(o.nom);
  summary["leak"] = absolute_string(o.leak);
  summary["candidates"] = score.candidates.size();
  if (!score.candidates.empty()) summary["top"] = net.node(score.candidates.front()).id;
  if (!o.leak_node.empty()) {
    const Index leak_node = net.node_index(o.leak_node);
    summary["leak_node"] = o.leak_node;
    summary["over_ranked"] = over_ranked_count(score, leak_node, net.adjacency());
  }
  write_json(o.out / "localization.json", summary);
  out << "localization: " << score.candidates.size() << " candidates";
  if (summary.contains("over_ranked")) out << ", over-ranked " << summary["over_ranked"].get<Index>();
  out << " -> " << o.out.string() << '\n';
}

void evaluate(const EvaluateOptions& o, std::ostream& out) { detail::evaluate_run(o, out); }

void pipeline(const PipelineOptions& o, std::ostream& out) {
  ojson doc = parse_json(read_text_file(o.spec), "pipeline spec");
  fs::path base = fs::absolute(o.spec).parent_path();
  if (doc.contains("pipeline")) doc = doc["pipeline"];  // rerun from a manifest
  if (!doc.is_object()) throw InputError("pipeline spec must be a JSON object");
  const auto path_field = [&](const char* key, bool required) -> std::string {
    if (!doc.contains(key) || doc[key].is_null()) {
      if (required) throw InputError(std::string("pipeline spec lacks '") + key + "'");
      return {};
    }
    if (!doc[key].is_string()) throw InputError(std::string("pipeline spec: '") + key + "' must be a path");
    return absolute_string(base / doc[key].get<std::string>());
  };

  ojson resolved;
  resolved["network"] = path_field("network", true);
  resolved["sensors"] = path_field("sensors", true);
  const std::string config = path_field("config", false);
  resolved["config"] = config.empty() ? ojson(nullptr) : ojson(config);
  if (!doc.contains("scenario")) throw InputError("pipeline spec lacks 'scenario'");
  if (doc["scenario"].is_string()) {
    resolved["scenario"] = parse_json(read_text_file(path_field("scenario", true)), "scenario");
  } else {
    resolved["scenario"] = doc["scenario"];
  }
  resolved["hours"] = doc.value("hours", std::string("every-other"));
  resolved["guess_seed"] = doc.value("guess_seed", std::uint64_t{1});

  const fs::path data_dir = o.out / "data";
  const std::string scenario_text = resolved["scenario"].dump();
  const ojson gen = detail::generate_bundle(resolved["network"].get<std::string>(),
                                            resolved["sensors"].get<std::string>(), scenario_text, data_dir, out);
  if (!config.empty()) write_text_file(data_dir / "config.json", read_text_file(config));

  EvaluateOptions eo;
  eo.data = data_dir;
  eo.out = o.out;
  eo.config = config;
  eo.hours = resolved["hours"].get<std::string>();
  eo.guess_seed = resolved["guess_seed"].get<std::uint64_t>();
  eo.jobs = o.jobs;
  const ojson eval = detail::evaluate_run(eo, out);

  ojson manifest;
  manifest["tool"] = "hydrostate";
  manifest["version"] = kToolVersion;
  manifest["command"] = "pipeline";
  manifest["pipeline"] = resolved;
  manifest["generate"] = gen;
  manifest["evaluate"] = eval;
  write_json(o.out / "manifest.json", manifest);
}

}  // namespace hydrostate::cli
