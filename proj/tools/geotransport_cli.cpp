// geotransport command-line driver.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical blow-up, 4 IO error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "geotransport/io.hpp"
#include "geotransport/problems.hpp"
#include "geotransport/run.hpp"

using namespace geotransport;

namespace {

enum Exit { ok = 0, config_error = 2, blowup = 3, io_error = 4 };

// Angular scheme flags shared by several subcommands.
struct SchemeFlags {
  std::string scheme = "femn";
  int k = 1;
  int lmax = -1;

  void add(CLI::App* app) {
    app->add_option("--scheme", scheme, "femn, sn or fpn")->capture_default_str();
    app->add_option("--k", k, "geodesic refinement level (femn, sn)")->capture_default_str();
    app->add_option("--lmax", lmax, "spherical-harmonic degree (fpn)");
  }
  int resolution() const { return lmax >= 0 ? lmax : k; }
  AngularBasis basis() const {
    try {
      return AngularBasis::make(parse_basis_kind(scheme), resolution());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

int grid_info(const SchemeFlags& s, const std::string& out) {
  const AngularBasis basis = s.basis();
  std::cout << "scheme " << to_string(basis.kind()) << "\nresolution " << basis.resolution() << "\nN " << basis.size()
            << '\n';
  if (const GeodesicGrid* g = basis.grid()) {
    std::cout << "points " << g->num_points() << "\nedges " << g->edges.size() << "\ntriangles " << g->triangles.size()
              << '\n';
    if (!out.empty()) {
      std::ofstream f(out);
      if (!f) throw IoError("cannot write '" + out + "'");
      write_grid(f, *g);
      if (!f) throw IoError("cannot write '" + out + "'");
    }
  } else if (!out.empty()) {
    throw ConfigError("fpn has no geodesic grid to export");
  }
  return ok;
}

int do_export(const SchemeFlags& s, double v, const std::string& dir) {
  const AngularMatrices m = assemble_matrices(s.basis(), v);
  for (const auto& p : export_matrices(dir, m)) std::cout << p.string() << '\n';
  return ok;
}

int do_error(const std::vector<std::string>& files, bool against_oracle) {
  const FieldFile a = read_field(files.at(0));
  const Eigen::VectorXd ea = field_energy(a);
  Eigen::VectorXd eb;
  if (against_oracle) {
    if (files.size() != 1) throw ConfigError("--oracle compares a single field");
    if (a.header.problem.empty()) throw ConfigError("field header names no problem");
    // the oracle only needs the grid, so any basis will do
    ProblemOptions o;
    o.cells = a.header.grid.nx;
    const Problem p = make_problem(a.header.problem, AngularBasis::femn(0), o);
    if (!(p.grid == a.header.grid)) throw ConfigError("field grid differs from the problem grid");
    eb = oracle_energy(p, a.header.time);
  } else {
    if (files.size() != 2) throw ConfigError("error needs two field files or --oracle");
    const FieldFile b = read_field(files[1]);
    if (!(a.header.grid == b.header.grid)) throw ConfigError("fields live on different grids");
    eb = field_energy(b);
  }
  std::cout.precision(17);
  std::cout << "l1_error " << l1_error(ea, eb) << "\nlinf_error " << (ea - eb).cwiseAbs().maxCoeff() << '\n';
  return ok;
}

int do_oracle(const std::string& name, double scale, int cells, double time, const std::string& out) {
  ProblemOptions o;
  o.scale = scale;
  if (cells > 0) o.cells = cells;
  const Problem p = make_problem(name, AngularBasis::femn(0), o);
  const double t = time >= 0.0 ? time : p.t_end;
  FieldHeader h;
  h.grid = p.grid;
  h.time = t;
  h.problem = p.name;
  write_field(out, h, oracle_energy(p, t).transpose());
  std::cout << out << '\n';
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic radiation transport on geodesic grids"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "solver threads (env GEOTRANSPORT_THREADS)");

  SchemeFlags grid_flags, export_flags;
  std::string grid_out;
  auto* grid_cmd = app.add_subcommand("grid-info", "print basis and grid sizes");
  grid_flags.add(grid_cmd);
  grid_cmd->add_option("--out", grid_out, "write the geodesic grid as text");

  double export_v = kDefaultDissipation;
  std::string export_dir = "matrices";
  auto* export_cmd = app.add_subcommand("export-matrices", "dump angular matrices");
  export_flags.add(export_cmd);
  export_cmd->add_option("--v", export_v, "minimum dissipation speed");
  export_cmd->add_option("--out", export_dir, "output directory")->capture_default_str();

  // run: every flag is forwarded to RunConfig::set after the config file
  auto* run_cmd = app.add_subcommand("run", "run a benchmark problem");
  std::string config_file;
  run_cmd->add_option("--config", config_file, "key=value config file");
  const std::vector<std::pair<std::string, std::string>> run_keys = {
      {"--problem", "problem"},        {"--scheme", "scheme"},
      {"--k", "k"},                    {"--lmax", "lmax"},
      {"--scale", "scale"},            {"--cells", "cells"},
      {"--dt", "dt"},                  {"--t-end", "t_end"},
      {"--limiter", "limiter"},        {"--positivity", "positivity"},
      {"--sigma-eff", "sigma_eff"},    {"--filter-strength", "filter_strength"},
      {"--v", "v"},                    {"--cfl-max", "cfl_max"},
      {"--out", "output_dir"},         {"--snapshot-every", "snapshot_every"},
      {"--beams", "beams"},            {"--beam-width", "beam_width"},
      {"--lattice-variant", "lattice_variant"}};
  std::vector<std::string> run_values(run_keys.size());
  std::vector<CLI::Option*> run_opts;
  for (std::size_t i = 0; i < run_keys.size(); ++i)
    run_opts.push_back(run_cmd->add_option(run_keys[i].first, run_values[i]));
  std::vector<std::string> overrides;
  run_cmd->add_option("--set", overrides, "extra key=value settings");
  bool write_f = false, cfl_strict = false, quiet = false;
  run_cmd->add_flag("--write-coefficients", write_f, "also write full F snapshots");
  run_cmd->add_flag("--cfl-strict", cfl_strict, "treat a CFL violation as an error");
  run_cmd->add_flag("--quiet", quiet);

  std::vector<std::string> error_files;
  bool against_oracle = false;
  auto* error_cmd = app.add_subcommand("error", "L1/Linf difference of two fields, or of one field and its oracle");
  error_cmd->add_option("files", error_files)->required()->expected(1, 2);
  error_cmd->add_flag("--oracle", against_oracle);

  std::string oracle_problem, oracle_out = "oracle.geotf";
  double oracle_scale = 1.0, oracle_time = -1.0;
  int oracle_cells = 0;
  auto* oracle_cmd = app.add_subcommand("oracle", "write the reference energy field");
  oracle_cmd->add_option("--problem", oracle_problem)->required();
  oracle_cmd->add_option("--scale", oracle_scale);
  oracle_cmd->add_option("--cells", oracle_cells);
  oracle_cmd->add_option("--time", oracle_time, "default: the problem end time");
  oracle_cmd->add_option("--out", oracle_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : config_error;
  }

  try {
    if (threads <= 0) {
      if (const char* env = std::getenv("GEOTRANSPORT_THREADS")) threads = std::atoi(env);
    }
    if (threads > 0) omp_set_num_threads(threads);

    if (*grid_cmd) return grid_info(grid_flags, grid_out);
    if (*export_cmd) return do_export(export_flags, export_v, export_dir);
    if (*error_cmd) return do_error(error_files, against_oracle);
    if (*oracle_cmd) return do_oracle(oracle_problem, oracle_scale, oracle_cells, oracle_time, oracle_out);

    RunConfig config;
    if (!config_file.empty()) config.load(config_file);
    for (std::size_t i = 0; i < run_keys.size(); ++i)
      if (run_opts[i]->count()) config.set(run_keys[i].second, run_values[i]);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (write_f) config.write_coefficients = true;
    if (cfl_strict) config.cfl_strict = true;
    if (quiet) config.quiet = true;
    run(config, std::cerr);
    return ok;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const NumericalBlowup& e) {
    std::cerr << e.what() << '\n';
    return blowup;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return io_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
