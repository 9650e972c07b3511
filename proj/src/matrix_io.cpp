#include "spikedeig/matrix_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "spikedeig/errors.hpp"

namespace spikedeig {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'K', 'D', 'M', 'A', 'T', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<unsigned char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t get_u64(std::istream& is, const std::string& path) {
  std::array<unsigned char, 8> b;
  if (!is.read(reinterpret_cast<char*>(b.data()), 8)) throw Error(Errc::Io, "truncated matrix file " + path);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& s, const std::string& path) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) throw Error(Errc::Io, "bad number '" + s + "' in " + path);
  return v;
}

}  // namespace

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::Io, "cannot open " + path + " for writing");
  os << m.rows() << ',' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
  if (!os) throw Error(Errc::Io, "write failed for " + path);
}

void write_matrix_binary(const std::string& path, const Matrix& m) {
  static_assert(std::endian::native == std::endian::little, "binary matrix IO assumes a little-endian host");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::Io, "cannot open " + path + " for writing");
  os.write(kMagic, sizeof kMagic);
  put_u64(os, static_cast<std::uint64_t>(m.rows()));
  put_u64(os, static_cast<std::uint64_t>(m.cols()));
  os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!os) throw Error(Errc::Io, "write failed for " + path);
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw Error(Errc::Io, "empty matrix file " + path);
  const auto comma = line.find(',');
  if (comma == std::string::npos) throw Error(Errc::Io, "missing dims header in " + path);
  const double r = parse_double(line.substr(0, comma), path);
  const double c = parse_double(line.substr(comma + 1), path);
  if (r < 0 || c < 0 || r != static_cast<long long>(r) || c != static_cast<long long>(c))
    throw Error(Errc::Io, "bad dims header in " + path);
  Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!std::getline(is, line)) throw Error(Errc::Io, "too few rows in " + path);
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index j = 0;
    while (std::getline(ss, cell, ',')) {
      if (j >= m.cols()) throw Error(Errc::Io, "too many columns in " + path);
      m(i, j++) = parse_double(cell, path);
    }
    if (j != m.cols()) throw Error(Errc::Io, "too few columns in " + path);
  }
  return m;
}

Matrix read_matrix_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::Io, "cannot open " + path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw Error(Errc::Io, "bad magic in " + path);
  const std::uint64_t r = get_u64(is, path);
  const std::uint64_t c = get_u64(is, path);
  if (r > (1ull << 31) || c > (1ull << 31)) throw Error(Errc::Io, "implausible dims in " + path);
  Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  if (!is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double))))
    throw Error(Errc::Io, "truncated matrix file " + path);
  return m;
}

Matrix read_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::Io, "cannot open " + path);
  char magic[8] = {};
  is.read(magic, 8);
  if (is.gcount() == 8 && std::memcmp(magic, kMagic, 8) == 0) return read_matrix_binary(path);
  return read_matrix_csv(path);
}

}  // namespace spikedeig
