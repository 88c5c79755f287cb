#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hydrostate::cli {

enum ExitCode : int { kOk = 0, kBadArguments = 2, kInputFailure = 3, kNumericalFailure = 4 };

// Parses argv, runs the subcommand and maps failures to exit codes. Errors
// are reported as one JSON line on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

namespace fs = std::filesystem;

struct MakeNetworkOptions {
  int junctions = 80;
  int reservoirs = 1;
  int pipes = 85;
  double demand_lps = 120.0;
  double spacing_m = 200.0;
  std::uint64_t seed = 7;
  bool modena_sized = false;
  fs::path out;
  fs::path sensors_out;
  int pressure_junctions = 3;
  int extra_amr = 8;
};

struct GenerateOptions {
  fs::path network;
  fs::path sensors;
  fs::path spec;
  fs::path out;
};

struct EstimateOptions {
  std::string method;
  fs::path data;
  fs::path sensors;  // optional; must match the bundle
  fs::path config;
  fs::path out;
  fs::path init;  // optional earlier estimate whose heads become h0
  std::string scenario = "leak";
  std::string hours = "all";
};

struct LocalizeOptions {
  fs::path nom;
  fs::path leak;
  fs::path out;
  fs::path network;  // optional; default from the estimate manifest
  std::string leak_node;
};

struct EvaluateOptions {
  fs::path data;
  fs::path out;
  fs::path config;  // optional; default <data>/config.json, then built-in
  std::string hours = "every-other";
  std::uint64_t guess_seed = 1;
  int jobs = 1;
};

struct PipelineOptions {
  fs::path spec;  // pipeline spec or a manifest written by an earlier run
  fs::path out;
  int jobs = 1;
};

void make_network(const MakeNetworkOptions& o, std::ostream& out);
void generate(const GenerateOptions& o, std::ostream& out);
void estimate(const EstimateOptions& o, std::ostream& out);
void localize(const LocalizeOptions& o, std::ostream& out);
void evaluate(const EvaluateOptions& o, std::ostream& out);
void pipeline(const PipelineOptions& o, std::ostream& out);

// "all", "every-other" or a comma-separated list, applied to the hours
// present in the data.
std::vector<int> select_hours(const std::string& spec, const std::vector<int>& available);

}  // namespace hydrostate::cli
