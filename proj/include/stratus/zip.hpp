#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace stratus {

struct ZipError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZipEntry {
  std::string name;
  std::uint16_t method = 0;  // 0 = store, 8 = deflate
  std::uint32_t crc32 = 0;
  std::uint64_t compressed_size = 0;
  std::uint64_t uncompressed_size = 0;
  std::uint64_t local_header_offset = 0;
  bool is_dir() const { return !name.empty() && name.back() == '/'; }
};

/// Read-only ZIP container. Supports store and deflate entries, no zip64.
class ZipReader {
 public:
  static ZipReader from_bytes(std::string bytes);
  static ZipReader from_file(const std::filesystem::path& path);

  const std::vector<ZipEntry>& entries() const { return entries_; }
  bool contains(std::string_view name) const;
  /// Decompressed entry bytes; verifies CRC-32.
  std::string read(std::string_view name) const;

 private:
  std::string bytes_;
  std::vector<ZipEntry> entries_;

  void parse_central_directory();
};

/// Store-only ZIP writer, enough to assemble contribution packages.
class ZipWriter {
 public:
  void add(std::string name, std::string_view bytes);
  std::string finish() const;
  void write_file(const std::filesystem::path& path) const;

 private:
  struct Pending {
    std::string name;
    std::string bytes;
  };
  std::vector<Pending> pending_;
};

}  // namespace stratus
