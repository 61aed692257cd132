#include "pnppbcd/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

namespace pnppbcd {

namespace {

void put_u32(std::vector<char>& buf, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) buf.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[k])) << (8 * k);
  return v;
}

void put_f64(std::vector<char>& buf, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int k = 0; k < 8; ++k) buf.push_back(static_cast<char>((bits >> (8 * k)) & 0xffu));
}

double get_f64(const char* p) {
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[k])) << (8 * k);
  return std::bit_cast<double>(bits);
}

std::uint32_t checked_u32(Index v, const char* what) {
  if (v < 1 || static_cast<std::uint64_t>(v) > std::numeric_limits<std::uint32_t>::max()) {
    throw ShapeError(std::string(what) + " out of range for the file format");
  }
  return static_cast<std::uint32_t>(v);
}

std::vector<char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const std::filesystem::path& path, const std::vector<char>& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("write failed: " + path.string());
}

// Throws unless the file is exactly header + count * elem bytes long.
void check_length(const std::string& name, std::size_t header, std::uint64_t count, std::uint64_t elem,
                  std::size_t actual) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / 2;
  if (count > limit / elem) throw FormatError(name + ": dimensions overflow");
  const std::uint64_t want = header + count * elem;
  if (actual < want) throw FormatError(name + ": truncated payload");
  if (actual > want) throw FormatError(name + ": trailing bytes after payload");
}

}  // namespace

void save_hsi(const std::filesystem::path& path, const Tensor3& t) {
  std::vector<char> buf{'H', 'S', 'I', '1'};
  put_u32(buf, checked_u32(t.n1(), "n1"));
  put_u32(buf, checked_u32(t.n2(), "n2"));
  put_u32(buf, checked_u32(t.n3(), "n3"));
  buf.reserve(buf.size() + 8 * static_cast<std::size_t>(t.size()));
  for (double d : t.data()) put_f64(buf, d);
  write_all(path, buf);
}

Tensor3 load_hsi(const std::filesystem::path& path) {
  const auto buf = read_all(path);
  const std::string name = path.string();
  if (buf.size() < 16) throw FormatError(name + ": truncated header");
  if (std::memcmp(buf.data(), "HSI1", 4) != 0) throw FormatError(name + ": bad magic (expected HSI1)");
  const std::uint64_t n1 = get_u32(buf.data() + 4);
  const std::uint64_t n2 = get_u32(buf.data() + 8);
  const std::uint64_t n3 = get_u32(buf.data() + 12);
  if (n1 == 0 || n2 == 0 || n3 == 0) throw FormatError(name + ": zero dimension");
  if (n1 * n2 > std::numeric_limits<std::uint64_t>::max() / 16 / n3) throw FormatError(name + ": dimensions overflow");
  check_length(name, 16, n1 * n2 * n3, 8, buf.size());
  std::vector<double> data(n1 * n2 * n3);
  for (std::size_t k = 0; k < data.size(); ++k) data[k] = get_f64(buf.data() + 16 + 8 * k);
  return Tensor3(Dims{static_cast<Index>(n1), static_cast<Index>(n2), static_cast<Index>(n3)}, std::move(data));
}

void save_mask(const std::filesystem::path& path, const Mask& m) {
  if (m.data.size() != static_cast<std::size_t>(m.n1 * m.n2)) throw ShapeError("save_mask: data size mismatch");
  std::vector<char> buf{'M', 'S', 'K', '1'};
  put_u32(buf, checked_u32(m.n1, "n1"));
  put_u32(buf, checked_u32(m.n2, "n2"));
  for (auto v : m.data) {
    if (v > 1) throw ConfigError("save_mask: values must be 0 or 1");
    buf.push_back(static_cast<char>(v));
  }
  write_all(path, buf);
}

Mask load_mask(const std::filesystem::path& path) {
  const auto buf = read_all(path);
  const std::string name = path.string();
  if (buf.size() < 12) throw FormatError(name + ": truncated header");
  if (std::memcmp(buf.data(), "MSK1", 4) != 0) throw FormatError(name + ": bad magic (expected MSK1)");
  const std::uint64_t n1 = get_u32(buf.data() + 4);
  const std::uint64_t n2 = get_u32(buf.data() + 8);
  if (n1 == 0 || n2 == 0) throw FormatError(name + ": zero dimension");
  check_length(name, 12, n1 * n2, 1, buf.size());
  Mask m{static_cast<Index>(n1), static_cast<Index>(n2), {}};
  m.data.assign(buf.begin() + 12, buf.end());
  for (auto v : m.data)
    if (v > 1) throw FormatError(name + ": mask values must be 0 or 1");
  return m;
}

}  // namespace pnppbcd
