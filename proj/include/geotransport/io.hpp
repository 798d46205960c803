#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "geotransport/angular_basis.hpp"
#include "geotransport/dg_solver.hpp"
#include "geotransport/solver.hpp"

namespace geotransport {

/// File-system failure or unreadable file.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Readable file whose contents are not a valid field.
struct FormatError : IoError {
  using IoError::IoError;
};

enum class Payload { energy, coefficients };

/// Field file layout:
///
///   geotfield1
///   scheme femn            (femn | sn | fpn | oracle)
///   resolution 1           (k or l_max; 0 for oracle)
///   n_basis 42
///   nx 100
///   ny 100
///   dx ...  dy ...  origin_x ...  origin_y ...  time ...
///   payload E              (E | F)
///   problem line_source    (optional)
///   <blank line>
///   little-endian float64, i slowest, then j, then basis index
///
/// Unknown header keys are ignored by the reader.
struct FieldHeader {
  std::string scheme = "oracle";
  int resolution = 0;
  int n_basis = 1;
  SpatialGrid2D grid;
  double time = 0.0;
  Payload payload = Payload::energy;
  std::string problem;

  /// Values per cell: 1 for E, n_basis for F.
  int components() const { return payload == Payload::energy ? 1 : n_basis; }
};

/// data is components x cells, cells indexed as in SpatialGrid2D::index.
struct FieldFile {
  FieldHeader header;
  Eigen::MatrixXd data;
};

void write_field(const std::filesystem::path& path, const FieldHeader& header, const Eigen::MatrixXd& data);
/// Throws FormatError on a bad magic, header or payload size; nothing is
/// returned unless the whole file parsed.
FieldFile read_field(const std::filesystem::path& path);

FieldHeader header_for(const AngularBasis& basis, const FieldState& state, Payload payload);
/// E per cell, converting an F payload with the basis its header names.
Eigen::VectorXd field_energy(const FieldFile& file);

/// Dense row-major float64 dumps of M, M-bar, S^i, S-tilde^i, S-hat^i plus a
/// text sidecar `matrices.txt`. Returns the written paths (sidecar last).
std::vector<std::filesystem::path> export_matrices(const std::filesystem::path& dir, const AngularMatrices& m);
/// Reads one dump back (N x N).
Eigen::MatrixXd read_matrix(const std::filesystem::path& path, int n);

/// step,time,indicator_fraction,clipped_energy
class DiagnosticsWriter {
 public:
  explicit DiagnosticsWriter(const std::filesystem::path& path);
  void write(const StepDiagnostics& d);

 private:
  std::ofstream out_;
};

}  // namespace geotransport
