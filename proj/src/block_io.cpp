#include "wedgeframe/block_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wedgeframe/error.hpp"

namespace wedgeframe {

namespace {

constexpr char kMagic[4] = {'W', 'F', 'D', 'B'};
constexpr std::uint32_t kVersion = 1;

std::uint8_t native_order() { return std::endian::native == std::endian::little ? 0 : 1; }

template <typename T>
T byteswap_value(T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  std::memcpy(&v, b, sizeof(T));
  return v;
}

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, bool swap) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error(ErrorCode::Io, "truncated block file");
  return swap ? byteswap_value(v) : v;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + tmp.string());
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::Io, "rename to " + path + " failed: " + ec.message());
}

void write_block_binary(const DenseBlock& block, const std::string& path) {
  std::ostringstream os(std::ios::binary);
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::int32_t>(os, block.d);
  put<std::int32_t>(os, block.Ntilde);
  put<std::int32_t>(os, block.N);
  put<std::uint8_t>(os, native_order());
  for (const cplx& v : block.values) {
    put<double>(os, v.real());
    put<double>(os, v.imag());
  }
  write_file_atomic(path, os.str());
}

DenseBlock read_block_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw Error(ErrorCode::Io, path + " is not a block file");
  // The byte-order flag follows the fixed-size header fields.
  const auto header_pos = is.tellg();
  is.seekg(header_pos + std::streamoff(16));
  const auto order = get<std::uint8_t>(is, false);
  const bool swap = order != native_order();
  is.seekg(header_pos);
  const auto version = get<std::uint32_t>(is, swap);
  if (version != kVersion) throw Error(ErrorCode::Io, "unsupported block file version");
  const int d = get<std::int32_t>(is, swap);
  const int Nt = get<std::int32_t>(is, swap);
  const int N = get<std::int32_t>(is, swap);
  (void)get<std::uint8_t>(is, false);
  if (d < 1 || Nt < 0 || N < 0) throw Error(ErrorCode::Io, "corrupt block header");
  DenseBlock block(d, Nt, N);
  for (auto& v : block.values) {
    const double re = get<double>(is, swap);
    const double im = get<double>(is, swap);
    v = {re, im};
  }
  return block;
}

void write_block_csv(const DenseBlock& block, const std::string& path) {
  const auto rows = box_indexing(block.d, block.Ntilde);
  const auto cols = box_indexing(block.d, block.N);
  std::string out;
  for (int i = 0; i < block.d; ++i) out += "jp_" + std::to_string(i) + ",";
  for (int i = 0; i < block.d; ++i) out += "j_" + std::to_string(i) + ",";
  out += "re,im\n";
  char buf[64];
  for (std::size_t r = 0; r < block.rows(); ++r) {
    for (std::size_t c = 0; c < block.cols(); ++c) {
      for (int v : rows->coords(r)) out += std::to_string(v) + ",";
      for (int v : cols->coords(c)) out += std::to_string(v) + ",";
      const cplx z = block(r, c);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", z.real(), z.imag());
      out += buf;
    }
  }
  write_file_atomic(path, out);
}

}  // namespace wedgeframe
