#include "fixtures.hpp"

#include "cli.hpp"
#include "hydrostate/evaluation.hpp"
#include "hydrostate/network_io.hpp"
#include "hydrostate/scenario_io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sstream>

using namespace hydrostate;
namespace fx = hydrostate::fixture;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "hydrostate");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return fx::data_path(name).string(); }

json read_json(const fs::path& p) { return json::parse(read_text_file(p)); }

}  // namespace

TEST_CASE("pipeline on the small desk fixture") {
  fx::TempDir dir("pipeline");
  const fs::path out = dir.path() / "run";
  const Result r = run({"pipeline", "--spec", data("desk20_pipeline.json"), "--out", out.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (const char* file : {"traces.csv", "summary.csv", "localization_ranking.csv", "colormap.json", "rmse.csv",
                           "reductions.csv", "initial_guess.csv", "manifest.json"}) {
    CHECK_MESSAGE(fs::exists(out / file), file);
  }
  const json m = read_json(out / "manifest.json");
  CHECK(m["command"] == "pipeline");
  CHECK(m["evaluate"]["config"]["K"] == 50);

  SUBCASE("rerunning from the manifest reproduces the outputs") {
    const fs::path again = dir.path() / "again";
    const Result r2 = run({"pipeline", "--spec", (out / "manifest.json").string(), "--out", again.string()});
    REQUIRE_MESSAGE(r2.code == 0, r2.err);
    for (const char* file : {"traces.csv", "summary.csv", "rmse.csv", "reductions.csv", "initial_guess.csv",
                             "localization_ranking.csv", "colormap.json", "localization.json"}) {
      CHECK_MESSAGE(read_text_file(out / file) == read_text_file(again / file), file);
    }
    for (const char* file : {"heads.csv", "measured_heads.csv", "measured_demands.csv"}) {
      CHECK(read_text_file(out / "data" / "leak" / file) == read_text_file(again / "data" / "leak" / file));
    }
  }
}

TEST_CASE("exact data through the full pipeline") {
  fx::TempDir dir("exact");
  const Result r = run({"pipeline", "--spec", data("desk20_exact_pipeline.json"), "--out", dir.path().string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto summaries = summaries_from_rmse_csv(read_text_file(dir.path() / "rmse.csv"));
  for (const auto& m : summaries) {
    if (m.method == Method::UkfAwGsi) CHECK(m.summary.max < 0.05);
  }
}

TEST_CASE("estimate composes through the estimates file") {
  fx::TempDir dir("compose");
  const fs::path bundle = dir.path() / "bundle";
  const Result g = run({"generate", "--network", data("desk20.json"), "--sensors", data("desk20_sensors.json"),
                        "--spec", data("desk20_scenario.json"), "--out", bundle.string()});
  REQUIRE_MESSAGE(g.code == 0, g.err);
  const fs::path aw = dir.path() / "aw";
  const Result a = run({"estimate", "--method", "awgsi", "--data", bundle.string(), "--config",
                        data("desk_config.json"), "--out", aw.string(), "--hours", "8,10"});
  REQUIRE_MESSAGE(a.code == 0, a.err);
  const fs::path ukf = dir.path() / "ukf";
  const Result u = run({"estimate", "--method", "ukf-awgsi", "--data", bundle.string(), "--config",
                        data("desk_config.json"), "--out", ukf.string(), "--init", aw.string(), "--hours", "8,10"});
  REQUIRE_MESSAGE(u.code == 0, u.err);

  const json m = read_json(ukf / "manifest.json");
  CHECK(m["init"] == fs::absolute(aw).string());
  // the filter starts where the interpolation ended
  const HourTable aw_rmse = parse_hour_table(read_text_file(aw / "rmse.csv"));
  const std::string traces = read_text_file(ukf / "traces.csv");
  std::istringstream in(traces);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);  // hour 8, k = 0
  CHECK(line.rfind("8,0,", 0) == 0);
  const std::string value = line.substr(std::string("8,0,").size());
  CHECK(std::stod(value.substr(0, value.find(','))) == doctest::Approx(aw_rmse.rows[0](0)).epsilon(1e-12));

  SUBCASE("localize from two estimate directories") {
    const fs::path nom = dir.path() / "nom";
    const Result n = run({"estimate", "--method", "awgsi", "--data", bundle.string(), "--config",
                          data("desk_config.json"), "--out", nom.string(), "--hours", "8,10", "--scenario", "nominal"});
    REQUIRE_MESSAGE(n.code == 0, n.err);
    const fs::path loc = dir.path() / "loc";
    const Result l =
        run({"localize", "--nom", nom.string(), "--leak", aw.string(), "--out", loc.string(), "--leak-node", "J14"});
    REQUIRE_MESSAGE(l.code == 0, l.err);
    CHECK(fs::exists(loc / "localization_ranking.csv"));
    CHECK(fs::exists(loc / "colormap.json"));
    CHECK(read_json(loc / "localization.json").contains("over_ranked"));
  }
}

TEST_CASE("the reference configuration is accepted and echoed") {
  fx::TempDir dir("reference");
  const fs::path bundle = dir.path() / "bundle";
  const fs::path scenario = dir.path() / "scenario.json";
  write_text_file(scenario, R"({"leak_node": "J150", "hours": [8], "seed": 1})");
  const Result g = run({"generate", "--network", data("modena_sized.inp"), "--sensors", data("modena_sized_sensors.json"),
                        "--spec", scenario.string(), "--out", bundle.string()});
  REQUIRE_MESSAGE(g.code == 0, g.err);
  const fs::path out = dir.path() / "aw";
  const Result a = run({"estimate", "--method", "awgsi", "--data", bundle.string(), "--config",
                        data("reference_config.json"), "--out", out.string()});
  REQUIRE_MESSAGE(a.code == 0, a.err);
  const json c = read_json(out / "manifest.json")["config"];
  CHECK(c["n_s"] == 20);
  CHECK(c["n_ca"] == 40);
  CHECK(c["K"] == 50);
  CHECK(c["K_u"] == 5);
  CHECK(c["Q"] == 1.0);
  CHECK(c["R"] == 1e-4);
}

TEST_CASE("exit codes") {
  fx::TempDir dir("codes");
  SUBCASE("bad arguments") {
    const Result r = run({"estimate", "--method", "kalman"});
    CHECK(r.code == 2);
    CHECK(json::parse(r.err)["code"] == 2);
    CHECK(run({"frobnicate"}).code == 2);
  }
  SUBCASE("unreadable input") {
    const fs::path bad = dir.path() / "bad.json";
    write_text_file(bad, "{\"nodes\": [");
    const Result r = run({"generate", "--network", bad.string(), "--sensors", data("desk20_sensors.json"), "--spec",
                          data("desk20_scenario.json"), "--out", (dir.path() / "o").string()});
    CHECK(r.code == 3);
    const json e = json::parse(r.err);
    CHECK(e["error"] == "parse");
  }
  SUBCASE("numerical failure") {
    const fs::path bundle = dir.path() / "bundle";
    REQUIRE(run({"generate", "--network", data("desk20.json"), "--sensors", data("desk20_sensors.json"), "--spec",
                 data("desk20_scenario.json"), "--out", bundle.string()})
                .code == 0);
    const fs::path cfg = dir.path() / "cfg.json";
    write_text_file(cfg, R"({"P0": 1e300, "K": 3})");
    const fs::path out = dir.path() / "out";
    const Result r = run({"estimate", "--method", "ukf-gsi", "--data", bundle.string(), "--config", cfg.string(),
                          "--out", out.string(), "--hours", "8"});
    CHECK(r.code == 4);
    const json e = json::parse(r.err);
    CHECK(e["error"] == "numerical");
    REQUIRE(e.contains("diagnostics"));
    CHECK(fs::exists(e["diagnostics"].get<std::string>()));
  }
}

TEST_CASE("hour selection") {
  const std::vector<int> all{0, 1, 2, 3, 4, 5};
  CHECK(cli::select_hours("all", all) == all);
  CHECK(cli::select_hours("every-other", all) == std::vector<int>{0, 2, 4});
  CHECK(cli::select_hours("3,1", all) == std::vector<int>{3, 1});
  CHECK_THROWS(cli::select_hours("7", all));
}
