#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace weightlab::app {

/// Thrown for bad flags or configurations; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int n = 1;
  /// Grid resolution for grid-backed gallery weights and signals.
  int resolution = 4096;
  int depth = 8;
  std::vector<double> p{2.0};
  std::vector<double> q{};
  std::vector<double> s{2.0, 1.5, 1.25};
  std::vector<double> r{2.0};
  std::vector<double> gammas{0.5, 0.25, 0.125, 0.0625, 0.03125};
  std::vector<double> eps{0.2, 0.1, 0.05};
  double tol = 1e-9;
  std::uint64_t seed = 7;
  std::string out;
  std::string format = "json";
  /// "gallery", "random", "all" or "none": built-in weight sets for verify.
  std::string weights = "all";
  /// Extra weight specs (JSON text or @file).
  std::vector<std::string> weight_specs;
  int random_weights = 10;
  /// Half side of the ambient box of the dyadic family.
  double box = 2.0;
  std::string signal = R"({"type":"bump"})";
  std::string timestamp = "1970-01-01T00:00:00Z";
};

inline constexpr const char* kSchema = "weightlab.report/1";
inline constexpr const char* kVersion = "1.0.0";

struct CommandResult {
  nlohmann::ordered_json report;
  /// name -> CSV text
  std::vector<std::pair<std::string, std::string>> tables;
  /// One line per verdict or row for the terminal.
  std::vector<std::string> summary;
  int exit_code = 0;
};

const std::vector<std::string>& verify_suites();

CommandResult cmd_constants(const RunConfig& config);
CommandResult cmd_verify(const std::string& suite, const RunConfig& config);
CommandResult cmd_cfi(const RunConfig& config);
CommandResult cmd_sweep(const RunConfig& config);

/// Writes the report and tables according to config.out and config.format;
/// the JSON goes to `stdout_sink` when no output path is set.
void write_outputs(const CommandResult& result, const RunConfig& config, std::ostream& stdout_sink);

/// Reads "@path" specs from disk; other text is returned unchanged.
std::string load_spec(const std::string& spec);

}  // namespace weightlab::app
