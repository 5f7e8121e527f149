#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include "lena/errors.hpp"

namespace lena {

// Binary instance snapshots. Layout: 8-byte magic, u32 format version,
// u32 kind tag, payload, trailing fnv1a checksum of the payload.
// All integers little-endian.

inline constexpr char snapshot_magic[8] = {'L', 'E', 'N', 'A', 'S', 'N', 'A', 'P'};
inline constexpr std::uint32_t snapshot_version = 1;
inline constexpr std::uint32_t snapshot_kind_matrix_sensing = 1;
inline constexpr std::uint32_t snapshot_kind_quartic = 2;

class SnapshotWriter {
 public:
  SnapshotWriter(const std::string &path, std::uint32_t kind);
  void write_bytes(const void *data, std::size_t n);
  void write_u32(std::uint32_t v);
  void write_i32(std::int32_t v);
  void write_u64(std::uint64_t v);
  void write_i64(std::int64_t v);
  void write_f64(double v);
  void finish();

 private:
  std::ofstream out_;
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
  bool finished_ = false;
};

class SnapshotReader {
 public:
  SnapshotReader(const std::string &path, std::uint32_t expected_kind);
  /// Opens and reports the kind without pinning it (for dispatch).
  explicit SnapshotReader(const std::string &path);
  std::uint32_t kind() const { return kind_; }
  void read_bytes(void *data, std::size_t n);
  std::uint32_t read_u32();
  std::int32_t read_i32();
  std::uint64_t read_u64();
  std::int64_t read_i64();
  double read_f64();
  void finish();

 private:
  void open(const std::string &path);
  std::ifstream in_;
  std::uint32_t kind_ = 0;
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace lena
