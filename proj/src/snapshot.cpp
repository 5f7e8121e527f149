#include "lena/snapshot.hpp"

#include <cstring>
#include <type_traits>

namespace lena {

namespace {

void fnv1a(std::uint64_t &h, const unsigned char *p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

template <typename T>
void put_le(unsigned char *out, T v) {
  using U = std::make_unsigned_t<T>;
  U u;
  std::memcpy(&u, &v, sizeof(U));
  for (std::size_t i = 0; i < sizeof(U); ++i) out[i] = static_cast<unsigned char>(u >> (8 * i));
}

template <typename T>
T get_le(const unsigned char *in) {
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) u |= static_cast<U>(in[i]) << (8 * i);
  T v;
  std::memcpy(&v, &u, sizeof(U));
  return v;
}

}  // namespace

SnapshotWriter::SnapshotWriter(const std::string &path, std::uint32_t kind)
    : out_(path, std::ios::binary | std::ios::trunc) {
  require(out_.good(), Errc::io, "cannot open snapshot for writing: " + path);
  out_.write(snapshot_magic, sizeof(snapshot_magic));
  unsigned char buf[4];
  put_le<std::uint32_t>(buf, snapshot_version);
  out_.write(reinterpret_cast<const char *>(buf), 4);
  put_le<std::uint32_t>(buf, kind);
  out_.write(reinterpret_cast<const char *>(buf), 4);
}

void SnapshotWriter::write_bytes(const void *data, std::size_t n) {
  fnv1a(hash_, static_cast<const unsigned char *>(data), n);
  out_.write(static_cast<const char *>(data), static_cast<std::streamsize>(n));
}

void SnapshotWriter::write_u32(std::uint32_t v) {
  unsigned char buf[4];
  put_le(buf, v);
  write_bytes(buf, 4);
}

void SnapshotWriter::write_i32(std::int32_t v) {
  unsigned char buf[4];
  put_le(buf, v);
  write_bytes(buf, 4);
}

void SnapshotWriter::write_u64(std::uint64_t v) {
  unsigned char buf[8];
  put_le(buf, v);
  write_bytes(buf, 8);
}

void SnapshotWriter::write_i64(std::int64_t v) {
  unsigned char buf[8];
  put_le(buf, v);
  write_bytes(buf, 8);
}

void SnapshotWriter::write_f64(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(bits);
}

void SnapshotWriter::finish() {
  if (finished_) return;
  finished_ = true;
  unsigned char buf[8];
  put_le(buf, hash_);
  out_.write(reinterpret_cast<const char *>(buf), 8);
  out_.flush();
  require(out_.good(), Errc::io, "snapshot write failed");
  out_.close();
}

SnapshotReader::SnapshotReader(const std::string &path) { open(path); }

SnapshotReader::SnapshotReader(const std::string &path, std::uint32_t expected_kind) {
  open(path);
  require(kind_ == expected_kind, Errc::io, "snapshot kind mismatch: " + path);
}

void SnapshotReader::open(const std::string &path) {
  in_.open(path, std::ios::binary);
  require(in_.good(), Errc::io, "cannot open snapshot: " + path);
  char magic[8];
  in_.read(magic, 8);
  require(in_.good() && std::memcmp(magic, snapshot_magic, 8) == 0, Errc::io,
          "not a snapshot file: " + path);
  unsigned char buf[4];
  in_.read(reinterpret_cast<char *>(buf), 4);
  const std::uint32_t version = get_le<std::uint32_t>(buf);
  require(in_.good() && version == snapshot_version, Errc::io, "unsupported snapshot version");
  in_.read(reinterpret_cast<char *>(buf), 4);
  require(in_.good(), Errc::io, "truncated snapshot header");
  kind_ = get_le<std::uint32_t>(buf);
}

void SnapshotReader::read_bytes(void *data, std::size_t n) {
  in_.read(static_cast<char *>(data), static_cast<std::streamsize>(n));
  require(in_.good(), Errc::io, "truncated snapshot");
  fnv1a(hash_, static_cast<const unsigned char *>(data), n);
}

std::uint32_t SnapshotReader::read_u32() {
  unsigned char buf[4];
  read_bytes(buf, 4);
  return get_le<std::uint32_t>(buf);
}

std::int32_t SnapshotReader::read_i32() {
  unsigned char buf[4];
  read_bytes(buf, 4);
  return get_le<std::int32_t>(buf);
}

std::uint64_t SnapshotReader::read_u64() {
  unsigned char buf[8];
  read_bytes(buf, 8);
  return get_le<std::uint64_t>(buf);
}

std::int64_t SnapshotReader::read_i64() {
  unsigned char buf[8];
  read_bytes(buf, 8);
  return get_le<std::int64_t>(buf);
}

double SnapshotReader::read_f64() {
  const std::uint64_t bits = read_u64();
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void SnapshotReader::finish() {
  const std::uint64_t expected = hash_;
  unsigned char buf[8];
  in_.read(reinterpret_cast<char *>(buf), 8);
  require(in_.good(), Errc::io, "truncated snapshot: missing checksum");
  const std::uint64_t stored = get_le<std::uint64_t>(buf);
  require(stored == expected, Errc::io, "snapshot checksum mismatch");
}

}  // namespace lena
