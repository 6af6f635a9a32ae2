#include "stratus/zip.hpp"

#include <fstream>

#include <zlib.h>

namespace stratus {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEocdSig = 0x06054b50;

std::uint16_t rd16(const std::string& b, std::size_t off) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                    (static_cast<unsigned char>(b[off + 1]) << 8));
}

std::uint32_t rd32(const std::string& b, std::size_t off) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[off])) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 1])) << 8) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 2])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 3])) << 24);
}

void wr16(std::string& b, std::uint16_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>((v >> 8) & 0xff));
}

void wr32(std::string& b, std::uint32_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>((v >> 8) & 0xff));
  b.push_back(static_cast<char>((v >> 16) & 0xff));
  b.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::string inflate_raw(const std::string& in, std::uint64_t expected_size) {
  std::string out;
  out.resize(expected_size);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw ZipError("inflateInit failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw ZipError("deflate stream corrupt");
  if (zs.total_out != expected_size) throw ZipError("decompressed size mismatch");
  return out;
}

}  // namespace

ZipReader ZipReader::from_bytes(std::string bytes) {
  ZipReader r;
  r.bytes_ = std::move(bytes);
  r.parse_central_directory();
  return r;
}

ZipReader ZipReader::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ZipError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_bytes(std::move(bytes));
}

void ZipReader::parse_central_directory() {
  if (bytes_.size() < 22) throw ZipError("not a zip archive (too small)");
  // EOCD: scan backwards, comment may follow
  std::size_t limit = bytes_.size() >= 22 + 65535 ? bytes_.size() - 22 - 65535 : 0;
  std::size_t eocd = std::string::npos;
  for (std::size_t off = bytes_.size() - 22;; --off) {
    if (rd32(bytes_, off) == kEocdSig) {
      eocd = off;
      break;
    }
    if (off == limit) break;
  }
  if (eocd == std::string::npos) throw ZipError("end-of-central-directory not found");

  std::uint16_t count = rd16(bytes_, eocd + 10);
  std::uint32_t cd_size = rd32(bytes_, eocd + 12);
  std::uint32_t cd_offset = rd32(bytes_, eocd + 16);
  if (count == 0xffff || cd_offset == 0xffffffff) throw ZipError("zip64 not supported");
  if (static_cast<std::uint64_t>(cd_offset) + cd_size > bytes_.size())
    throw ZipError("central directory out of range");

  std::size_t off = cd_offset;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (off + 46 > bytes_.size() || rd32(bytes_, off) != kCentralSig)
      throw ZipError("central directory entry corrupt");
    ZipEntry e;
    e.method = rd16(bytes_, off + 10);
    e.crc32 = rd32(bytes_, off + 16);
    e.compressed_size = rd32(bytes_, off + 20);
    e.uncompressed_size = rd32(bytes_, off + 24);
    std::uint16_t name_len = rd16(bytes_, off + 28);
    std::uint16_t extra_len = rd16(bytes_, off + 30);
    std::uint16_t comment_len = rd16(bytes_, off + 32);
    e.local_header_offset = rd32(bytes_, off + 42);
    if (off + 46 + name_len > bytes_.size()) throw ZipError("entry name out of range");
    e.name = bytes_.substr(off + 46, name_len);
    entries_.push_back(std::move(e));
    off += 46 + name_len + extra_len + comment_len;
  }
}

bool ZipReader::contains(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return true;
  }
  return false;
}

std::string ZipReader::read(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name != name) continue;
    std::size_t off = e.local_header_offset;
    if (off + 30 > bytes_.size() || rd32(bytes_, off) != kLocalSig)
      throw ZipError("local header corrupt for " + e.name);
    std::uint16_t name_len = rd16(bytes_, off + 26);
    std::uint16_t extra_len = rd16(bytes_, off + 28);
    std::size_t data_off = off + 30 + name_len + extra_len;
    if (data_off + e.compressed_size > bytes_.size())
      throw ZipError("entry data out of range for " + e.name);
    std::string raw = bytes_.substr(data_off, e.compressed_size);
    std::string data;
    if (e.method == 0) {
      data = std::move(raw);
    } else if (e.method == 8) {
      data = inflate_raw(raw, e.uncompressed_size);
    } else {
      throw ZipError("unsupported compression method for " + e.name);
    }
    std::uint32_t crc =
        ::crc32(0, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
    if (crc != e.crc32) throw ZipError("crc mismatch for " + e.name);
    return data;
  }
  throw ZipError("no such entry: " + std::string(name));
}

void ZipWriter::add(std::string name, std::string_view bytes) {
  pending_.push_back(Pending{std::move(name), std::string(bytes)});
}

std::string ZipWriter::finish() const {
  std::string out;
  std::vector<std::pair<const Pending*, std::uint32_t>> offsets;  // entry, local offset
  for (const auto& p : pending_) {
    std::uint32_t crc =
        ::crc32(0, reinterpret_cast<const Bytef*>(p.bytes.data()), static_cast<uInt>(p.bytes.size()));
    offsets.emplace_back(&p, static_cast<std::uint32_t>(out.size()));
    wr32(out, kLocalSig);
    wr16(out, 20);  // version needed
    wr16(out, 0);   // flags
    wr16(out, 0);   // method: store
    wr16(out, 0);   // mod time
    wr16(out, 0);   // mod date
    wr32(out, crc);
    wr32(out, static_cast<std::uint32_t>(p.bytes.size()));
    wr32(out, static_cast<std::uint32_t>(p.bytes.size()));
    wr16(out, static_cast<std::uint16_t>(p.name.size()));
    wr16(out, 0);  // extra
    out += p.name;
    out += p.bytes;
  }
  std::uint32_t cd_offset = static_cast<std::uint32_t>(out.size());
  for (const auto& [p, local_off] : offsets) {
    std::uint32_t crc =
        ::crc32(0, reinterpret_cast<const Bytef*>(p->bytes.data()), static_cast<uInt>(p->bytes.size()));
    wr32(out, kCentralSig);
    wr16(out, 20);  // version made by
    wr16(out, 20);  // version needed
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0);
    wr32(out, crc);
    wr32(out, static_cast<std::uint32_t>(p->bytes.size()));
    wr32(out, static_cast<std::uint32_t>(p->bytes.size()));
    wr16(out, static_cast<std::uint16_t>(p->name.size()));
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0);
    wr32(out, 0);
    wr32(out, local_off);
    out += p->name;
  }
  std::uint32_t cd_size = static_cast<std::uint32_t>(out.size()) - cd_offset;
  wr32(out, kEocdSig);
  wr16(out, 0);
  wr16(out, 0);
  wr16(out, static_cast<std::uint16_t>(pending_.size()));
  wr16(out, static_cast<std::uint16_t>(pending_.size()));
  wr32(out, cd_size);
  wr32(out, cd_offset);
  wr16(out, 0);
  return out;
}

void ZipWriter::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ZipError("cannot write " + path.string());
  std::string bytes = finish();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace stratus
