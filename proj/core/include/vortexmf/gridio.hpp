#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace vortexmf {

/// Binary grid file: fixed little-endian header (magic "VMFG", version,
/// n, ncomp, two f64 metadata slots) followed by ncomp row-major n*n planes
/// of 64-bit floats. Kernel tables use meta1 = eps, meta2 = kmax; field
/// snapshots use meta1 = time.
struct GridFileInfo {
  std::uint64_t n{0};
  std::uint64_t ncomp{0};
  double meta1{0.0};
  double meta2{0.0};
};

void write_grid_file(const std::filesystem::path& path, std::uint64_t n,
                     std::uint64_t ncomp, double meta1, double meta2,
                     std::span<const double> payload);

GridFileInfo read_grid_file(const std::filesystem::path& path,
                            std::vector<double>& payload);

/// Particle snapshot file: magic "VMFS", N, t, then N records of
/// (x1, x2, xi) as little-endian f64.
void write_snapshot_file(const std::filesystem::path& path, std::uint64_t n,
                         double t, std::span<const double> x1,
                         std::span<const double> x2,
                         std::span<const double> xi);

struct SnapshotData {
  double t{0.0};
  std::vector<double> x1, x2, xi;
};

SnapshotData read_snapshot_file(const std::filesystem::path& path);

}  // namespace vortexmf
