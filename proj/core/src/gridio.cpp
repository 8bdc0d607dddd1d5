#include "vortexmf/gridio.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vortexmf {

namespace {

constexpr std::uint32_t kGridMagic = 0x47464D56u;  // "VMFG"
constexpr std::uint32_t kSnapMagic = 0x53464D56u;  // "VMFS"
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_u64(std::ofstream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_f64(std::ofstream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint32_t get_u32(std::ifstream& is) {
  std::uint32_t v;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::uint64_t get_u64(std::ifstream& is) {
  std::uint64_t v;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
double get_f64(std::ifstream& is) {
  double v;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void write_grid_file(const std::filesystem::path& path, std::uint64_t n,
                     std::uint64_t ncomp, double meta1, double meta2,
                     std::span<const double> payload) {
  if (payload.size() != n * n * ncomp) {
    throw std::invalid_argument("write_grid_file: payload size mismatch");
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("write_grid_file: cannot open " + path.string());
  put_u32(os, kGridMagic);
  put_u32(os, kVersion);
  put_u64(os, n);
  put_u64(os, ncomp);
  put_f64(os, meta1);
  put_f64(os, meta2);
  os.write(reinterpret_cast<const char*>(payload.data()),
           static_cast<std::streamsize>(payload.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write_grid_file: write failed");
}

GridFileInfo read_grid_file(const std::filesystem::path& path,
                            std::vector<double>& payload) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_grid_file: cannot open " + path.string());
  if (get_u32(is) != kGridMagic) throw std::runtime_error("read_grid_file: bad magic");
  if (get_u32(is) != kVersion) throw std::runtime_error("read_grid_file: bad version");
  GridFileInfo info;
  info.n = get_u64(is);
  info.ncomp = get_u64(is);
  info.meta1 = get_f64(is);
  info.meta2 = get_f64(is);
  payload.resize(info.n * info.n * info.ncomp);
  is.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size() * sizeof(double)));
  if (!is) throw std::runtime_error("read_grid_file: truncated payload");
  return info;
}

void write_snapshot_file(const std::filesystem::path& path, std::uint64_t n,
                         double t, std::span<const double> x1,
                         std::span<const double> x2,
                         std::span<const double> xi) {
  if (x1.size() != n || x2.size() != n || xi.size() != n) {
    throw std::invalid_argument("write_snapshot_file: array size mismatch");
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("write_snapshot_file: cannot open " + path.string());
  put_u32(os, kSnapMagic);
  put_u32(os, kVersion);
  put_u64(os, n);
  put_f64(os, t);
  for (std::uint64_t i = 0; i < n; ++i) {
    put_f64(os, x1[i]);
    put_f64(os, x2[i]);
    put_f64(os, xi[i]);
  }
  if (!os) throw std::runtime_error("write_snapshot_file: write failed");
}

SnapshotData read_snapshot_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_snapshot_file: cannot open " + path.string());
  if (get_u32(is) != kSnapMagic) throw std::runtime_error("read_snapshot_file: bad magic");
  if (get_u32(is) != kVersion) throw std::runtime_error("read_snapshot_file: bad version");
  SnapshotData out;
  const std::uint64_t n = get_u64(is);
  out.t = get_f64(is);
  out.x1.resize(n);
  out.x2.resize(n);
  out.xi.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    out.x1[i] = get_f64(is);
    out.x2[i] = get_f64(is);
    out.xi[i] = get_f64(is);
  }
  if (!is) throw std::runtime_error("read_snapshot_file: truncated payload");
  return out;
}

}  // namespace vortexmf
