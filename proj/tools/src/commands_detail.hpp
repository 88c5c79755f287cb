#pragma once

#include "cli.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace hydrostate::cli {

// Invalid command-line usage detected after parsing (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

std::string number(double v);  // shortest round-trip form
std::string fixed2(double v);

nlohmann::ordered_json generate_bundle(const fs::path& network_path, const fs::path& sensors_path,
                                       std::string_view scenario_text, const fs::path& out_dir, std::ostream& out);
nlohmann::ordered_json evaluate_run(const EvaluateOptions& o, std::ostream& out);

}  // namespace detail
}  // namespace hydrostate::cli
