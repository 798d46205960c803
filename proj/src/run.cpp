#include "geotransport/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "geotransport/io.hpp"

namespace geotransport {

namespace fs = std::filesystem;

namespace {

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <class F>
auto rethrow_as_config(F f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  rethrow_as_config([&] {
    if (key == "problem") {
      const auto& names = problem_names();
      if (std::find(names.begin(), names.end(), value) == names.end())
        throw ConfigError("unknown problem '" + value + "'");
      problem = value;
    } else if (key == "scheme") {
      scheme = parse_basis_kind(value);
    } else if (key == "k" || key == "lmax" || key == "l_max" || key == "resolution") {
      resolution = to_int(key, value);
    } else if (key == "scale") {
      problem_options.scale = to_double(key, value);
    } else if (key == "cells" || key == "nx") {
      problem_options.cells = to_int(key, value);
    } else if (key == "dt") {
      problem_options.dt = to_double(key, value);
    } else if (key == "t_end") {
      problem_options.t_end = to_double(key, value);
    } else if (key == "limiter") {
      limiter = parse_slope_limiter(value);
    } else if (key == "positivity") {
      positivity = parse_positivity(value);
    } else if (key == "sigma_eff") {
      sigma_eff = to_double(key, value);
    } else if (key == "filter_strength") {
      filter_strength = to_double(key, value);
    } else if (key == "v" || key == "dissipation") {
      dissipation = to_double(key, value);
    } else if (key == "cfl_max") {
      cfl_max = to_double(key, value);
    } else if (key == "cfl_strict") {
      cfl_strict = to_bool(key, value);
    } else if (key == "output_dir") {
      output_dir = value;
    } else if (key == "snapshot_every") {
      snapshot_every = to_int(key, value);
    } else if (key == "write_coefficients") {
      write_coefficients = to_bool(key, value);
    } else if (key == "lattice_variant") {
      if (value != "caption" && value != "text") throw ConfigError("lattice_variant must be caption or text");
      problem_options.lattice_text_variant = value == "text";
    } else if (key == "beams") {
      problem_options.beams = parse_beams(value);
    } else if (key == "beam_width") {
      problem_options.beam_width = to_double(key, value);
    } else if (key == "quiet") {
      quiet = to_bool(key, value);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  });
}

void RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected key=value");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

Positivity RunConfig::resolved_positivity() const {
  if (positivity) return *positivity;
  return scheme == BasisKind::fpn ? Positivity::filter : Positivity::clip;
}

void RunConfig::validate() const {
  const int max_res = scheme == BasisKind::fpn ? 60 : 7;
  if (resolution < 0 || resolution > max_res)
    throw ConfigError("angular resolution out of range [0, " + std::to_string(max_res) + "]");
  const Positivity p = resolved_positivity();
  if (p == Positivity::clip && scheme == BasisKind::fpn)
    throw ConfigError("the clipping limiter needs a non-negative basis (femn or sn), not fpn");
  if (p == Positivity::filter && scheme != BasisKind::fpn) throw ConfigError("the Lanczos filter applies to fpn only");
  if (!(problem_options.scale > 0.0)) throw ConfigError("scale must be positive");
  if (problem_options.cells && (*problem_options.cells < 2 || *problem_options.cells % 2))
    throw ConfigError("cells must be even and at least 2");
  if (problem_options.dt && !(*problem_options.dt > 0.0)) throw ConfigError("dt must be positive");
  if (problem_options.t_end && !(*problem_options.t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
  if (!(dissipation >= 0.0)) throw ConfigError("v must be non-negative");
  if (sigma_eff && !(*sigma_eff >= 0.0)) throw ConfigError("sigma_eff must be non-negative");
  if (filter_strength && !(*filter_strength >= 0.0)) throw ConfigError("filter_strength must be non-negative");
  if (!(cfl_max > 0.0)) throw ConfigError("cfl_max must be positive");
  if (snapshot_every < 0) throw ConfigError("snapshot_every must be non-negative");
  if (!(problem_options.beam_width > 0.0)) throw ConfigError("beam_width must be positive");
}

long step_count(double t_end, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (t_end <= 0.0) return 0;
  return static_cast<long>(std::ceil(t_end / dt - 1e-9));
}

RunResult run(const RunConfig& config, std::ostream& log) {
  config.validate();
  const AngularBasis basis = rethrow_as_config([&] { return AngularBasis::make(config.scheme, config.resolution); });
  const Problem problem = rethrow_as_config([&] { return make_problem(config.problem, basis, config.problem_options); });
  const AngularMatrices matrices = assemble_matrices(basis, config.dissipation);

  const double width = 2.0 * std::min(problem.grid.dx, problem.grid.dy);  // DG element
  const double cfl = problem.dt / width;
  if (cfl > config.cfl_max) {
    const std::string msg = "dt / element width = " + fmt(cfl) + " exceeds cfl_max = " + fmt(config.cfl_max);
    if (config.cfl_strict) throw ConfigError(msg);
    log << "warning: " << msg << '\n';
  }

  SolverOptions opt;
  opt.slope = config.limiter.value_or(problem.slope);
  opt.positivity = config.resolved_positivity();
  opt.filter.sigma_eff = config.sigma_eff.value_or(problem.sigma_eff);
  opt.filter.strength = config.filter_strength;
  TransportSolver solver =
      rethrow_as_config([&] { return TransportSolver(basis, matrices, problem.grid, problem.medium, problem.bc, opt); });

  const fs::path dir = config.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  FieldState state{problem.grid, problem.initial, 0.0};
  const long n = step_count(problem.t_end, problem.dt);
  solver.prepare(state, problem.dt);

  auto snapshot = [&](const std::string& tag) {
    FieldHeader h = header_for(basis, state, Payload::energy);
    h.problem = problem.name;
    const fs::path e_path = dir / ("E_" + tag + ".geotf");
    write_field(e_path, h, solver.energy(state).transpose());
    if (config.write_coefficients) {
      h.payload = Payload::coefficients;
      write_field(dir / ("F_" + tag + ".geotf"), h, state.coeffs);
    }
    return e_path;
  };
  auto step_tag = [](long k) {
    std::ostringstream s;
    s << std::setw(6) << std::setfill('0') << k;
    return s.str();
  };

  if (!config.quiet)
    log << problem.name << ": " << to_string(basis.kind()) << " N=" << basis.size() << ", " << problem.grid.nx << "x"
        << problem.grid.ny << " cells, dt=" << problem.dt << ", " << n << " steps\n";

  RunResult result;
  DiagnosticsWriter diagnostics(dir / "diagnostics.csv");
  if (config.snapshot_every > 0) snapshot(step_tag(0));
  for (long k = 1; k <= n; ++k) {
    const double t_next = k == n ? problem.t_end : k * problem.dt;
    StepDiagnostics d = solver.step(state, t_next - state.time);
    state.time = t_next;
    d.time = t_next;
    diagnostics.write(d);
    result.max_indicator = std::max(result.max_indicator, d.indicator);
    result.clipped_energy += d.clipped_energy;
    if (config.snapshot_every > 0 && k % config.snapshot_every == 0 && k != n) snapshot(step_tag(k));
    if (!config.quiet && n >= 10 && k % (n / 10) == 0) log << "  step " << k << "/" << n << "  t=" << state.time << '\n';
  }
  result.steps = n;
  result.time = state.time;
  result.final_field = snapshot("final");
  result.energy = solver.energy(state);

  if (problem.has_oracle && state.time > 0.0) {
    const Eigen::VectorXd exact = oracle_energy(problem, state.time);
    result.l1_error = l1_error(result.energy, exact);
    result.linf_error = (result.energy - exact).cwiseAbs().maxCoeff();
  }

  const fs::path summary_path = dir / "summary.txt";
  std::ofstream summary(summary_path);
  if (!summary) throw IoError("cannot write '" + summary_path.string() + "'");
  summary << "problem " << problem.name << "\nscheme " << to_string(basis.kind()) << "\nresolution "
          << basis.resolution() << "\nn_basis " << basis.size() << "\nnx " << problem.grid.nx << "\nny "
          << problem.grid.ny << "\ndt " << fmt(problem.dt) << "\nt_end " << fmt(problem.t_end) << "\nsteps " << n
          << "\nlimiter " << to_string(opt.slope) << "\npositivity " << to_string(opt.positivity) << "\nsigma_eff "
          << fmt(opt.filter.sigma_eff) << "\nv " << fmt(config.dissipation) << "\nmax_indicator "
          << fmt(result.max_indicator) << "\nclipped_energy " << fmt(result.clipped_energy) << '\n';
  if (result.l1_error) summary << "l1_error " << fmt(*result.l1_error) << "\nlinf_error " << fmt(*result.linf_error) << '\n';
  if (!summary) throw IoError("cannot write '" + summary_path.string() + "'");

  if (!config.quiet) {
    log << "done: t=" << state.time << ", E in [" << result.energy.minCoeff() << ", " << result.energy.maxCoeff() << "]\n";
    if (result.l1_error) log << "L1 error " << *result.l1_error << ", Linf error " << *result.linf_error << '\n';
  }
  return result;
}

}  // namespace geotransport
