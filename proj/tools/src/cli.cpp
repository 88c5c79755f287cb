#include "cli.hpp"
#include "commands_detail.hpp"

#include "hydrostate/error.hpp"
#include "hydrostate/network_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <ostream>

namespace hydrostate::cli {

namespace {

void report(std::ostream& err, const char* kind, int code, const std::string& message,
            const fs::path& diagnostics = {}) {
  nlohmann::ordered_json line;
  line["error"] = kind;
  line["code"] = code;
  line["message"] = message;
  if (!diagnostics.empty()) line["diagnostics"] = diagnostics.string();
  err << line.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nodal head estimation and leak localization for water networks", "hydrostate"};
  app.require_subcommand(1);
  fs::path out_dir;  // for numerical diagnostics

  MakeNetworkOptions mk;
  auto* c_mk = app.add_subcommand("make-network", "Generate a synthetic looped network and sensor layout");
  c_mk->add_option("--junctions", mk.junctions)->check(CLI::PositiveNumber);
  c_mk->add_option("--reservoirs", mk.reservoirs)->check(CLI::PositiveNumber);
  c_mk->add_option("--pipes", mk.pipes)->check(CLI::PositiveNumber);
  c_mk->add_option("--demand-lps", mk.demand_lps, "Average total demand")->check(CLI::PositiveNumber);
  c_mk->add_option("--spacing", mk.spacing_m, "Grid spacing in metres")->check(CLI::PositiveNumber);
  c_mk->add_option("--seed", mk.seed);
  c_mk->add_flag("--modena-sized", mk.modena_sized, "268 junctions, 317 pipes, 4 reservoirs");
  c_mk->add_option("--out", mk.out, "Output .inp or .json")->required();
  c_mk->add_option("--sensors-out", mk.sensors_out, "Also place sensors and write them here");
  c_mk->add_option("--pressure", mk.pressure_junctions, "Pressure sensors at junctions (reservoirs always)");
  c_mk->add_option("--amr", mk.extra_amr, "AMRs beyond the pressure sites");

  GenerateOptions gen;
  auto* c_gen = app.add_subcommand("generate", "Simulate leak and leak-free measurement data");
  c_gen->add_option("--network", gen.network)->required()->check(CLI::ExistingFile);
  c_gen->add_option("--sensors", gen.sensors)->required()->check(CLI::ExistingFile);
  c_gen->add_option("--spec", gen.spec, "Scenario JSON")->required()->check(CLI::ExistingFile);
  c_gen->add_option("--out", gen.out)->required();

  EstimateOptions est;
  auto* c_est = app.add_subcommand("estimate", "Estimate nodal heads with one method");
  c_est->add_option("--method", est.method)->required()->check(
      CLI::IsMember({"gsi", "awgsi", "ukf-gsi", "ukf-awgsi"}));
  c_est->add_option("--data", est.data, "Directory written by generate")->required();
  c_est->add_option("--sensors", est.sensors)->check(CLI::ExistingFile);
  c_est->add_option("--config", est.config)->required()->check(CLI::ExistingFile);
  c_est->add_option("--out", est.out)->required();
  c_est->add_option("--init", est.init, "Earlier estimate directory providing h0");
  c_est->add_option("--scenario", est.scenario)->check(CLI::IsMember({"leak", "nominal"}));
  c_est->add_option("--hours", est.hours, "all, every-other or a comma list");

  LocalizeOptions loc;
  auto* c_loc = app.add_subcommand("localize", "Rank leak candidates from leak-free and leak estimates");
  c_loc->add_option("--nom", loc.nom)->required();
  c_loc->add_option("--leak", loc.leak)->required();
  c_loc->add_option("--out", loc.out)->required();
  c_loc->add_option("--network", loc.network)->check(CLI::ExistingFile);
  c_loc->add_option("--leak-node", loc.leak_node, "Known leak node for the over-ranked count");

  EvaluateOptions ev;
  auto* c_ev = app.add_subcommand("evaluate", "Compare methods, initial guesses and localization");
  c_ev->add_option("--data", ev.data)->required();
  c_ev->add_option("--out", ev.out)->required();
  c_ev->add_option("--config", ev.config)->check(CLI::ExistingFile);
  c_ev->add_option("--hours", ev.hours, "all, every-other or a comma list");
  c_ev->add_option("--guess-seed", ev.guess_seed);
  c_ev->add_option("--jobs", ev.jobs)->check(CLI::Range(1, 256));

  PipelineOptions pl;
  auto* c_pl = app.add_subcommand("pipeline", "generate + evaluate from one spec or manifest");
  c_pl->add_option("--spec", pl.spec)->required()->check(CLI::ExistingFile);
  c_pl->add_option("--out", pl.out)->required();
  c_pl->add_option("--jobs", pl.jobs)->check(CLI::Range(1, 256));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    report(err, "usage", kBadArguments, e.what());
    return kBadArguments;
  }

  try {
    if (c_mk->parsed()) {
      make_network(mk, out);
    } else if (c_gen->parsed()) {
      out_dir = gen.out;
      generate(gen, out);
    } else if (c_est->parsed()) {
      out_dir = est.out;
      estimate(est, out);
    } else if (c_loc->parsed()) {
      localize(loc, out);
    } else if (c_ev->parsed()) {
      out_dir = ev.out;
      evaluate(ev, out);
    } else if (c_pl->parsed()) {
      out_dir = pl.out;
      pipeline(pl, out);
    }
  } catch (const UsageError& e) {
    report(err, "usage", kBadArguments, e.what());
    return kBadArguments;
  } catch (const ParseError& e) {
    report(err, "parse", kInputFailure, e.what());
    return kInputFailure;
  } catch (const InputError& e) {
    report(err, "input", kInputFailure, e.what());
    return kInputFailure;
  } catch (const nlohmann::json::exception& e) {
    report(err, "input", kInputFailure, e.what());
    return kInputFailure;
  } catch (const fs::filesystem_error& e) {
    report(err, "input", kInputFailure, e.what());
    return kInputFailure;
  } catch (const NumericalError& e) {
    fs::path diag;
    if (!out_dir.empty()) {
      diag = out_dir / "diagnostics.json";
      nlohmann::ordered_json d;
      d["error"] = e.what();
      d["residual"] = e.residual();
      try {
        write_text_file(diag, d.dump(2) + "\n");
      } catch (const std::exception&) {
        diag.clear();
      }
    }
    report(err, "numerical", kNumericalFailure, e.what(), diag);
    return kNumericalFailure;
  } catch (const std::exception& e) {
    report(err, "internal", 1, e.what());
    return 1;
  }
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace hydrostate::cli
