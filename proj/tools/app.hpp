#pragma once

// Command-line front end. Everything below main() lives here so the commands
// can be driven in-process by the tests.

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace kstapp {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

struct RunConfig {
  int gamma = 10;
  int n = 2;
  std::vector<int> k{1};
  int terms = 4;
  std::vector<double> x2{0.5};
  int x2_grid = 21;
  long mesh = 1001;
  double tol = 1e-10;
  std::filesystem::path out = "kst_out";
  int jobs = 1;
  std::string format = "json";
  int order = 8;  // largest m for the bell command

  nlohmann::json to_json() const;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies `key=value` lines (blank lines and '#' comments skipped).
void apply_config_text(RunConfig& cfg, const std::string& text);
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Rejects values outside the library preconditions.
void check_config(const RunConfig& cfg);

/// x2 rows of a sweep: x2_grid uniform values on [0, 1].
std::vector<double> sweep_rows(const RunConfig& cfg);

/// "slice_0.5", "slice_0.25": the row tag used in file names.
std::string slice_stem(double x2);

/// Full argv-style entry point; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_psi(const RunConfig& cfg, std::ostream& out);
int cmd_constants(const RunConfig& cfg, std::ostream& out);
int cmd_bell(const RunConfig& cfg, std::ostream& out);
int cmd_taylor_check(const RunConfig& cfg, std::ostream& out);
int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_compare(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);

}  // namespace kstapp
