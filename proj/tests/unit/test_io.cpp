#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "geotransport/io.hpp"
#include "geotransport/run.hpp"

using namespace geotransport;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "geotransport_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("field round trip is bit-identical") {
  const AngularBasis basis = AngularBasis::sn(1);
  FieldState state{SpatialGrid2D::covering(-1, 1, 0, 3, 4, 6), {}, 0.1 + 0.2};
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  state.coeffs.resize(basis.size(), state.grid.cells());
  for (auto& x : state.coeffs.reshaped()) x = g(rng);

  FieldHeader h = header_for(basis, state, Payload::coefficients);
  h.problem = "lattice";
  const fs::path p = scratch("f.geotf");
  write_field(p, h, state.coeffs);
  const FieldFile back = read_field(p);
  CHECK(back.data == state.coeffs);
  CHECK(back.header.grid == state.grid);
  CHECK(back.header.time == state.time);
  CHECK(back.header.scheme == "sn");
  CHECK(back.header.n_basis == basis.size());
  CHECK(back.header.problem == "lattice");
  CHECK((field_energy(back) - energy_field(state.coeffs, basis)).cwiseAbs().maxCoeff() == 0.0);

  // header text and payload layout: i slowest, then j, then basis index
  const std::string raw = slurp(p);
  CHECK(raw.rfind("geotfield1\nscheme sn\nresolution 1\nn_basis 42\nnx 4\nny 6\n", 0) == 0);
  const auto start = raw.find("\n\n") + 2;
  CHECK(raw.size() - start == 8u * 42 * 24);
  double second;
  std::memcpy(&second, raw.data() + start + 8, 8);  // host is little-endian here
  CHECK(second == state.coeffs(1, state.grid.index(0, 0)));
  double next_j;
  std::memcpy(&next_j, raw.data() + start + 8 * 42, 8);
  CHECK(next_j == state.coeffs(0, state.grid.index(0, 1)));
}

TEST_CASE("energy export of an isotropic state is constant") {
  const AngularBasis basis = AngularBasis::femn(1);
  const SpatialGrid2D grid = SpatialGrid2D::covering(0, 1, 0, 1, 6, 4);
  FieldState state{grid, basis.isotropic(2.5).replicate(1, grid.cells()), 0.0};
  const fs::path p = scratch("e.geotf");
  write_field(p, header_for(basis, state, Payload::energy), energy_field(state.coeffs, basis).transpose());
  const FieldFile f = read_field(p);
  CHECK(f.data.rows() == 1);
  CHECK((f.data.array() - 2.5).abs().maxCoeff() < 1e-13);
}

TEST_CASE("corrupt field files are rejected") {
  const SpatialGrid2D grid = SpatialGrid2D::covering(0, 1, 0, 1, 2, 2);
  FieldHeader h;
  h.grid = grid;
  const fs::path good = scratch("good.geotf");
  write_field(good, h, Eigen::RowVector4d(1, 2, 3, 4));
  const std::string raw = slurp(good);

  auto write_raw = [](const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; };
  const fs::path bad = scratch("bad.geotf");

  std::string magic = raw;
  magic[3] = 'X';
  write_raw(bad, magic);
  CHECK_THROWS_AS(read_field(bad), FormatError);

  write_raw(bad, raw.substr(0, raw.size() - 3));
  CHECK_THROWS_WITH_AS(read_field(bad), doctest::Contains("shorter"), FormatError);

  write_raw(bad, raw + "x");
  CHECK_THROWS_AS(read_field(bad), FormatError);

  std::string scheme = raw;
  scheme.replace(scheme.find("oracle"), 6, "bogus!");
  write_raw(bad, scheme);
  CHECK_THROWS_AS(read_field(bad), FormatError);

  std::string odd = raw;
  odd.replace(odd.find("nx 2"), 4, "nx 3");
  write_raw(bad, odd);
  CHECK_THROWS_AS(read_field(bad), FormatError);

  CHECK_THROWS_AS(read_field(scratch("missing.geotf")), IoError);
  CHECK_THROWS_AS(write_field(good, h, Eigen::RowVector3d(1, 2, 3)), std::invalid_argument);
}

TEST_CASE("matrix export") {
  const AngularBasis basis = AngularBasis::femn(0);
  const AngularMatrices m = assemble_matrices(basis);
  const fs::path dir = scratch("matrices");
  const auto files = export_matrices(dir, m);
  REQUIRE(files.size() == 12);
  for (std::size_t i = 0; i + 1 < files.size(); ++i) CHECK(fs::file_size(files[i]) == 12u * 12 * 8);
  CHECK(read_matrix(dir / "mass.bin", 12) == m.mass);
  CHECK(read_matrix(dir / "dissipation_y.bin", 12) == m.dissipation_matrix[1]);
  CHECK(read_matrix(dir / "lumped_mass.bin", 12).diagonal() == m.lumped_mass);
  CHECK_THROWS_AS(read_matrix(dir / "mass.bin", 11), FormatError);
  const std::string sidecar = slurp(files.back());
  CHECK(sidecar.find("kind femn\nN 12\nk 0\nv 0.57735026918962") == 0);
}

TEST_CASE("diagnostics csv") {
  const fs::path p = scratch("diag.csv");
  {
    DiagnosticsWriter w(p);
    w.write({3, 0.5, 0.25, 1e-3, 0});
  }
  CHECK(slurp(p) == "step,time,indicator_fraction,clipped_energy\n3,0.5,0.25,0.001\n");
}

TEST_CASE("run configuration") {
  RunConfig c;
  c.set("scheme", "fpn");
  c.set("lmax", "3");
  c.set("problem", "cylinder");
  CHECK(c.resolved_positivity() == Positivity::filter);
  CHECK_NOTHROW(c.validate());
  c.set("positivity", "clip");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(c.set("bogus", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("dt", "fast"), ConfigError);
  CHECK_THROWS_AS(c.set("problem", "moon"), ConfigError);
  CHECK_THROWS_AS(c.set("limiter", "superbee"), ConfigError);

  const fs::path p = scratch("run.cfg");
  std::ofstream(p) << "# comment\nproblem = lattice\n scheme=femn \nk = 2   # trailing\nlattice_variant = text\n";
  RunConfig d;
  d.load(p);
  CHECK(d.problem == "lattice");
  CHECK(d.scheme == BasisKind::femn);
  CHECK(d.resolution == 2);
  CHECK(d.problem_options.lattice_text_variant);
  CHECK(d.resolved_positivity() == Positivity::clip);
  std::ofstream(p) << "problem lattice\n";
  CHECK_THROWS_AS(d.load(p), ConfigError);

  CHECK(step_count(1.0, 0.008) == 125);
  CHECK(step_count(3.2, 0.0064) == 500);
  CHECK(step_count(0.25, 0.1) == 3);
  CHECK(step_count(0.0, 0.1) == 0);
}

TEST_CASE("runs are reproducible and write their artifacts") {
  RunConfig c;
  c.problem = "cylinder";
  c.scheme = BasisKind::sn;
  c.resolution = 0;
  c.problem_options.cells = 10;
  c.problem_options.t_end = 0.1;
  c.problem_options.dt = 0.03;
  c.snapshot_every = 2;
  c.write_coefficients = true;
  c.quiet = true;
  std::ostringstream log;
  c.output_dir = scratch("run_a");
  const RunResult a = run(c, log);
  c.output_dir = scratch("run_b");
  const RunResult b = run(c, log);
  CHECK(a.steps == 4);
  CHECK(b.energy == a.energy);
  CHECK(a.time == 0.1);
  CHECK(a.l1_error.has_value());
  for (const char* name : {"E_final.geotf", "F_final.geotf", "E_000000.geotf", "E_000002.geotf", "diagnostics.csv",
                           "summary.txt"}) {
    CHECK(fs::exists(scratch("run_a") / name));
    CHECK(slurp(scratch("run_a") / name) == slurp(scratch("run_b") / name));
  }
  const FieldFile f = read_field(a.final_field);
  CHECK(f.header.problem == "cylinder");
  CHECK(f.header.time == 0.1);
  CHECK(f.data.row(0).transpose() == a.energy);
  const std::string csv = slurp(scratch("run_a") / "diagnostics.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
