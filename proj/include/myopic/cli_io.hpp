#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace myopic {

enum class Command { region, simulate, listdec, strip_census, blob, caps_selftest };

std::string to_string(Command c);
std::optional<Command> parse_command(std::string_view name);
bool is_stochastic(Command c);

struct ConfigIssue {
  std::string key;
  std::string message;
};

// Every problem found in a config, reported together.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct ExperimentSpec {
  Command command = Command::region;
  // Effective parameters after defaults, as canonical text.
  std::map<std::string, std::string> params;
  std::optional<std::uint64_t> seed;
  std::string output_path;  // empty: stdout

  bool has(const std::string& key) const { return params.count(key) != 0; }
  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  const std::string& text(const std::string& key) const;

  // Sorted key=value lines, command and seed included, output excluded.
  std::string canonical() const;
  std::uint64_t config_hash() const;
};

// Accepts key=value lines ('#' comments allowed) or a JSON object; nested
// objects flatten to dotted keys. A seed override replaces any seed in the
// document and satisfies the seed requirement.
ExperimentSpec parse_config(std::string_view document,
                            std::optional<std::uint64_t> seed_override = std::nullopt);

std::uint64_t fnv1a64(std::string_view bytes);
std::string build_id();

using CsvCell = std::variant<double, long long, std::uint64_t, std::string>;

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<CsvCell>> rows;
};

// Shortest-safe round-trip text: 17 significant digits.
std::string format_real(double v);
std::string render_csv(const CsvTable& table);
void emit_csv(const CsvTable& table, const std::filesystem::path& path);

struct CommandResult {
  CsvTable table;
  bool selftest_failed = false;
};

// Runs the command and returns its rows; seed, build id and config hash
// lead every row.
CommandResult run_command(const ExperimentSpec& spec);

// Entry point behind the executable. Exit codes: 0 success, 1 invalid
// config or failed run, 2 self-test failure.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace myopic
