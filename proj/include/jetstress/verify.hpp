#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "jetstress/chart.hpp"
#include "jetstress/io.hpp"
#include "jetstress/measure.hpp"
#include "jetstress/random_fields.hpp"

namespace jetstress {

inline constexpr int kReportVersion = 1;

/// One verified identity. `residual` is the largest absolute residual seen;
/// a check passes when residual <= tolerance, or, for lower-bound checks
/// (demonstrations that something is non-zero), when residual > tolerance.
struct Check {
  std::string suite;
  std::string name;
  std::string identity;
  double residual = 0.0;
  double tolerance = 0.0;
  bool lower_bound = false;
  bool pass = false;
  std::string note;
};

Check make_check(std::string suite, std::string name, std::string identity, double residual,
                 double tolerance, bool lower_bound = false, std::string note = {});

struct Tolerances {
  double algebraic = 1e-12;
  double chart = 1e-9;
  double quadrature = 1e-9;
};

struct VerifyConfig {
  std::vector<int> ns{2, 3};
  std::vector<int> ks{2, 3};
  int m = 2;
  std::uint64_t seed = 20240611;
  int points = 100;   // sample points per random system
  int systems = 20;   // random polynomial systems per (n, k)
  int quadrature_order = 0;  // floor on rule order; raise it for non-polynomial data
  std::vector<std::string> suites;  // empty: all
  Tolerances tol;

  // Optional user data; each item is used wherever its shape matches.
  std::vector<FieldSpec> fields;
  std::optional<SmoothMap> section;  // w: R^n -> R^m
  std::optional<ChartMap> chart;
  std::optional<BundleTransition> transition;
  std::vector<Region> regions;

  /// "" or "collapse_factor": scales every collapse_last entry by c(I), the
  /// classic double-counting mistake. Checks that depend on it must fail.
  std::string fault_injection;
  int export_grid = 3;

  Json source;  // the document the config was read from
};

/// Throws ParseError on malformed or inconsistent documents.
VerifyConfig config_from_json(const Json& j);

struct Report {
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  bool pass() const;
  /// Deterministic except for the `timestamp` field (omitted when false).
  Json to_json(bool with_timestamp = true) const;
};

const std::vector<std::string>& suite_names();

/// Runs one named suite; throws std::invalid_argument for an unknown name.
std::vector<Check> run_suite(const std::string& name, const VerifyConfig& config);

/// Runs the selected suites (all when none are selected).
Report run_verify(const VerifyConfig& config);

/// Human-readable one-line summary of a check.
std::string format_check(const Check& check);

struct TableResult {
  std::string table;
  std::vector<Check> checks;
};

/// The built-in symmetry non-invariance example: chart x'1 = x1 + (x2)^2,
/// fully symmetric tau' at k = 4, plus the k = 2, identity and linear cases.
TableResult example_symmetry();

/// enumerate(n, l) counts against the closed form for n <= n_max, l <= l_max.
TableResult dims_table(int n_max, int l_max);

/// Grid samples of the configured (or seeded random) fields; returns the
/// manifest that is also written to out_dir/manifest.json.
Json export_samples(const VerifyConfig& config, const std::filesystem::path& out_dir);

/// The collapse used when config.fault_injection is set.
CollapseFn collapse_for(const VerifyConfig& config);

}  // namespace jetstress
