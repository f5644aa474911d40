#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

namespace chronos::cli {

struct BuiltinExample {
  std::string name;
  std::string summary;
  nlohmann::json descriptor;
};

/// The three reference systems shipped with the tool.
const std::vector<BuiltinExample>& builtin_examples();

/// Runs one command line (without the program name). Returns the process exit code:
/// 0 success / property holds, 1 property fails, 2 error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chronos::cli
