// Batch driver: command parsing, dispatch to the library and report rendering.
#pragma once

#include "opspace/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace opspace {

/// Bad command line; the message names the offending flag.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class OutputFormat { json, csv };

struct CommandSpec {
  std::string command;
  std::string space;  // selector, e.g. "full:2"; may come from the input file
  std::string input;  // file path or inline JSON
  std::vector<Index> levels;
  double tol = kDefaultTol;
  int grid = 64;
  int samples = 0;  // 0: command default
  std::optional<std::uint64_t> seed;
  int max_iter = 200;
  OutputFormat format = OutputFormat::json;
  std::string out;
  std::string mode = "cp";  // extend: cp | ucp
  bool quick = false;       // selftest

  // Filled in by parse_command.
  SpacePtr resolved_space;
  Json input_json;
};

const std::vector<std::string>& command_names();

/// Validates everything that can be checked without running the command,
/// including loading the space and input. Throws UsageError.
CommandSpec parse_command(const std::vector<std::string>& args);

struct Outcome {
  Json report;
  int exit_code = 0;  // 0 definitive, 2 undecided, 1 error
};

Outcome execute(const CommandSpec& spec);

std::string render(const Json& report, OutputFormat format);

/// Parse, execute, write. Usage errors and failures become exit status 1
/// with a structured error report.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opspace
