#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "geotransport/angular_basis.hpp"
#include "geotransport/problems.hpp"
#include "geotransport/solver.hpp"

namespace geotransport {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Everything a run needs. Unset optionals fall back to the problem defaults.
struct RunConfig {
  std::string problem = "line_source";
  BasisKind scheme = BasisKind::femn;
  int resolution = 1;  // k or l_max
  ProblemOptions problem_options;
  std::optional<SlopeLimiter> limiter;
  std::optional<Positivity> positivity;  // default: clip for femn/sn, filter for fpn
  std::optional<double> sigma_eff;
  std::optional<double> filter_strength;
  double dissipation = kDefaultDissipation;
  double cfl_max = 1.0 / 3.0;  // dt / element width
  bool cfl_strict = false;     // violation is an error instead of a warning
  std::filesystem::path output_dir = "out";
  int snapshot_every = 0;      // steps between snapshots; 0 writes the final state only
  bool write_coefficients = false;
  bool quiet = false;

  /// Apply one key=value setting. Throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Flat key=value file; '#' starts a comment.
  void load(const std::filesystem::path& path);

  /// Compatibility checks that do not need the problem set up.
  void validate() const;
  Positivity resolved_positivity() const;
};

struct RunResult {
  long steps = 0;
  double time = 0.0;
  Eigen::VectorXd energy;
  std::optional<double> l1_error, linf_error;
  double max_indicator = 0.0;
  double clipped_energy = 0.0;
  std::filesystem::path final_field;
};

/// Writes snapshots, diagnostics.csv and summary.txt into the output directory.
/// Throws ConfigError, NumericalBlowup or IoError.
RunResult run(const RunConfig& config, std::ostream& log);

/// Number of steps and step sizes: n = ceil(t_end / dt) with the last step shortened.
long step_count(double t_end, double dt);

}  // namespace geotransport
