#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdg5/problem.hpp"
#include "hdg5/stabilization.hpp"

namespace hdg5 {

/// "key = value" lines grouped under optional "[section]" headers; '#' starts a
/// comment. Keys are addressed as "section.key" (or "key" before any header).
class KeyValueFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  /// Throws ConfigError naming the source and line of a malformed line or a
  /// repeated key.
  static KeyValueFile parse(std::istream& in, const std::string& source);
  static KeyValueFile load(const std::string& path);

  const std::string& source() const { return source_; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const Entry* find(const std::string& key) const;
  const std::map<std::string, Entry>& entries() const { return entries_; }

  /// Typed getters; a malformed value throws ConfigError with the line.
  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<int> get_int(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;

  /// Throws ConfigError for any key not in `known`.
  void reject_unknown(const std::vector<std::string>& known) const;

  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

 private:
  std::string source_;
  std::map<std::string, Entry> entries_;
};

enum class RunMode { Solve, Study, Superconvergence, StabilityCheck };
std::string to_string(RunMode m);
RunMode parse_run_mode(const std::string& s);

enum class TauPreset { PaperPeriodic, PaperDirichlet, Zero, Custom };
std::string to_string(TauPreset p);
TauPreset parse_tau_preset(const std::string& s);

/// Everything a CLI invocation needs. Unset optionals take defaults at run time.
struct RunConfig {
  std::string problem = "P1";      ///< builtin id, ignored when problem_file is set
  std::string problem_file;        ///< custom problem definition
  int degree = 1;
  int elements = 32;
  int level_min = 3;
  int level_max = 7;
  std::optional<double> dt;        ///< unset: 0.1 h for k <= 1, 0.1 h^2 otherwise
  std::optional<double> final_time;  ///< unset: the problem's T
  /// Unset: paper-periodic or paper-dirichlet according to the boundary.
  std::optional<TauPreset> tau_preset;
  std::string tau_file;
  std::optional<StabilizationConfig> tau_values;  ///< inline [tau] section
  RunMode mode = RunMode::Solve;
  std::string out;                 ///< output path; empty writes to stdout
  bool allow_unstable = false;

  bool operator==(const RunConfig&) const = default;

  /// Range checks (k in [0, 8], N >= 2, T > 0, dt > 0, levels). Throws ConfigError.
  void validate() const;
};

RunConfig parse_run_config(const KeyValueFile& file);
/// Writes a file that parse_run_config reads back to an equal RunConfig.
void dump_run_config(std::ostream& os, const RunConfig& cfg);

/// Reads the twelve tau entries (missing ones are 0) and tau_F_rule from the
/// given section ("" for top level).
StabilizationConfig parse_tau_table(const KeyValueFile& file, const std::string& section);
void dump_tau_table(std::ostream& os, const StabilizationConfig& cfg);

/// Custom problem from a file with a [problem] section:
///   alpha, beta, left, right, boundary = periodic|dirichlet, final_time,
///   flux = c0, c1, ... (F(u) = sum c_i u^i), exact_u, forcing, initial.
/// exact_u, forcing and initial use the Expression grammar. Forcing and
/// initial default to the ones manufactured from exact_u; without exact_u
/// both are required and Dirichlet data are homogeneous.
ProblemSpec load_custom_problem(const KeyValueFile& file);

}  // namespace hdg5
