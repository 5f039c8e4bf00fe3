#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace gvmf::cli {

enum ExitCode : int { kOk = 0, kValidationError = 2, kNumericError = 3 };

using Cell = std::variant<double, long long, std::string, bool>;

/// Tabular result of one subcommand. CSV output is the header plus rows; JSON
/// output also carries the command name and the meta entries.
struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> meta;
};

void write_csv(std::ostream& out, const Table& t);
void write_json(std::ostream& out, const Table& t);

/// Runs the command line (arguments without the program name). Results go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gvmf::cli
