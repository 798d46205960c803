#include "geotransport/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <map>
#include <sstream>

namespace geotransport {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMagic = "geotfield1";

std::string exact(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

void put_le(std::ostream& out, double x) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  out.write(bytes, 8);
}

double get_le(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[b];
  return std::bit_cast<double>(bits);
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

template <class T>
T parse_number(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw FormatError("field header lacks '" + key + "'");
  std::istringstream s(it->second);
  T value{};
  s >> value;
  if (!s || !(s >> std::ws).eof()) throw FormatError("bad value for '" + key + "': " + it->second);
  return value;
}

void write_dense(const fs::path& path, const Eigen::MatrixXd& a) {
  auto out = open_out(path);
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) put_le(out, a(r, c));
  finish(out, path);
}

}  // namespace

void write_field(const fs::path& path, const FieldHeader& h, const Eigen::MatrixXd& data) {
  h.grid.validate();
  if (data.rows() != h.components() || data.cols() != h.grid.cells())
    throw std::invalid_argument("field data shape does not match its header");
  auto out = open_out(path);
  out << kMagic << '\n'
      << "scheme " << h.scheme << '\n'
      << "resolution " << h.resolution << '\n'
      << "n_basis " << h.n_basis << '\n'
      << "nx " << h.grid.nx << '\n'
      << "ny " << h.grid.ny << '\n'
      << "dx " << exact(h.grid.dx) << '\n'
      << "dy " << exact(h.grid.dy) << '\n'
      << "origin_x " << exact(h.grid.x0) << '\n'
      << "origin_y " << exact(h.grid.y0) << '\n'
      << "time " << exact(h.time) << '\n'
      << "payload " << (h.payload == Payload::energy ? "E" : "F") << '\n';
  if (!h.problem.empty()) out << "problem " << h.problem << '\n';
  out << '\n';
  for (int i = 0; i < h.grid.nx; ++i)
    for (int j = 0; j < h.grid.ny; ++j)
      for (Eigen::Index a = 0; a < data.rows(); ++a) put_le(out, data(a, h.grid.index(i, j)));
  finish(out, path);
}

FieldFile read_field(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw FormatError("'" + path.string() + "' is not a geotfield1 file");

  std::map<std::string, std::string> kv;
  while (true) {
    if (!std::getline(in, line)) throw FormatError("field header is not terminated by a blank line");
    if (line.empty()) break;
    const auto space = line.find(' ');
    if (space == std::string::npos) throw FormatError("malformed header line: " + line);
    kv[line.substr(0, space)] = line.substr(space + 1);
  }

  FieldFile f;
  FieldHeader& h = f.header;
  h.scheme = kv.count("scheme") ? kv["scheme"] : "";
  if (h.scheme != "femn" && h.scheme != "sn" && h.scheme != "fpn" && h.scheme != "oracle")
    throw FormatError("unknown scheme '" + h.scheme + "'");
  h.resolution = parse_number<int>(kv, "resolution");
  h.n_basis = parse_number<int>(kv, "n_basis");
  h.grid.nx = parse_number<int>(kv, "nx");
  h.grid.ny = parse_number<int>(kv, "ny");
  h.grid.dx = parse_number<double>(kv, "dx");
  h.grid.dy = parse_number<double>(kv, "dy");
  h.grid.x0 = parse_number<double>(kv, "origin_x");
  h.grid.y0 = parse_number<double>(kv, "origin_y");
  h.time = parse_number<double>(kv, "time");
  if (kv["payload"] == "E") h.payload = Payload::energy;
  else if (kv["payload"] == "F") h.payload = Payload::coefficients;
  else throw FormatError("payload must be E or F");
  if (kv.count("problem")) h.problem = kv["problem"];
  if (h.n_basis < 1) throw FormatError("n_basis must be positive");
  try {
    h.grid.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad grid in field header: ") + e.what());
  }

  const std::size_t count = static_cast<std::size_t>(h.components()) * h.grid.cells();
  std::vector<unsigned char> raw(count * 8);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw FormatError("payload is shorter than the header announces");
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("payload is longer than the header announces");

  f.data.resize(h.components(), h.grid.cells());
  std::size_t pos = 0;
  for (int i = 0; i < h.grid.nx; ++i)
    for (int j = 0; j < h.grid.ny; ++j)
      for (int a = 0; a < h.components(); ++a, pos += 8) f.data(a, h.grid.index(i, j)) = get_le(&raw[pos]);
  return f;
}

FieldHeader header_for(const AngularBasis& basis, const FieldState& state, Payload payload) {
  FieldHeader h;
  h.scheme = std::string(to_string(basis.kind()));
  h.resolution = basis.resolution();
  h.n_basis = basis.size();
  h.grid = state.grid;
  h.time = state.time;
  h.payload = payload;
  return h;
}

Eigen::VectorXd field_energy(const FieldFile& file) {
  if (file.header.payload == Payload::energy) return file.data.row(0).transpose();
  const AngularBasis basis = AngularBasis::make(parse_basis_kind(file.header.scheme), file.header.resolution);
  if (basis.size() != file.header.n_basis) throw FormatError("n_basis does not match the scheme's resolution");
  return energy_field(file.data, basis);
}

std::vector<fs::path> export_matrices(const fs::path& dir, const AngularMatrices& m) {
  std::vector<fs::path> written;
  auto dump = [&](const std::string& name, const Eigen::MatrixXd& a) {
    written.push_back(dir / (name + ".bin"));
    write_dense(written.back(), a);
  };
  dump("mass", m.mass);
  dump("lumped_mass", m.lumped_mass.asDiagonal().toDenseMatrix());
  static const char* axes[] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) dump(std::string("stiffness_") + axes[i], m.stiffness[i]);
  for (int i = 0; i < 3; ++i) dump(std::string("advection_") + axes[i], m.advection[i]);
  for (int i = 0; i < 3; ++i) dump(std::string("dissipation_") + axes[i], m.dissipation_matrix[i]);

  const fs::path sidecar = dir / "matrices.txt";
  auto out = open_out(sidecar);
  out << "kind " << to_string(m.kind) << '\n'
      << "N " << m.size << '\n'
      << (m.kind == BasisKind::fpn ? "l_max " : "k ") << m.resolution << '\n'
      << "v " << exact(m.dissipation) << '\n'
      << "layout row-major little-endian float64 N x N\n";
  for (const auto& p : written) out << "file " << p.filename().string() << '\n';
  finish(out, sidecar);
  written.push_back(sidecar);
  return written;
}

Eigen::MatrixXd read_matrix(const fs::path& path, int n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<unsigned char> raw(static_cast<std::size_t>(n) * n * 8);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size() || in.peek() != std::char_traits<char>::eof())
    throw FormatError("'" + path.string() + "' is not an N x N dump");
  Eigen::MatrixXd a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = get_le(&raw[8 * (static_cast<std::size_t>(r) * n + c)]);
  return a;
}

DiagnosticsWriter::DiagnosticsWriter(const fs::path& path) : out_(open_out(path)) {
  out_ << "step,time,indicator_fraction,clipped_energy\n";
}

void DiagnosticsWriter::write(const StepDiagnostics& d) {
  out_ << d.step << ',' << exact(d.time) << ',' << exact(d.indicator) << ',' << exact(d.clipped_energy) << '\n';
  if (!out_) throw IoError("diagnostics write failed");
}

}  // namespace geotransport
