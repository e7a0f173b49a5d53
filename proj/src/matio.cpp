#include "sbl/matio.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "sbl/report.hpp"

namespace sbl {

namespace {

static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559);

bool ends_with_csv(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

uint64_t byteswap64(uint64_t v) {
  v = ((v & 0x00000000FFFFFFFFULL) << 32) | ((v & 0xFFFFFFFF00000000ULL) >> 32);
  v = ((v & 0x0000FFFF0000FFFFULL) << 16) | ((v & 0xFFFF0000FFFF0000ULL) >> 16);
  v = ((v & 0x00FF00FF00FF00FFULL) << 8) | ((v & 0xFF00FF00FF00FF00ULL) >> 8);
  return v;
}

uint32_t byteswap32(uint32_t v) {
  v = ((v & 0x0000FFFFU) << 16) | ((v & 0xFFFF0000U) >> 16);
  v = ((v & 0x00FF00FFU) << 8) | ((v & 0xFF00FF00U) >> 8);
  return v;
}

constexpr bool kLittle = std::endian::native == std::endian::little;

uint32_t to_le32(uint32_t v) { return kLittle ? v : byteswap32(v); }
uint32_t from_le32(uint32_t v) { return kLittle ? v : byteswap32(v); }

double from_le_double(uint64_t bits) {
  if (!kLittle) bits = byteswap64(bits);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

uint64_t to_le_bits(double d) {
  uint64_t bits;
  std::memcpy(&bits, &d, 8);
  return kLittle ? bits : byteswap64(bits);
}

}  // namespace

Matrix read_matrix_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  if (!is) throw InputError("cannot open '" + path + "' for reading");
  const std::streamoff size = is.tellg();
  is.seekg(0);
  if (size < 8) throw InputError("'" + path + "' is too short for a matrix header");

  uint32_t dims[2];
  is.read(reinterpret_cast<char*>(dims), 8);
  const uint64_t rows = from_le32(dims[0]);
  const uint64_t cols = from_le32(dims[1]);
  const uint64_t expected = 8 + rows * cols * 8;
  if (static_cast<uint64_t>(size) != expected) {
    std::ostringstream os;
    os << "'" << path << "' declares " << rows << "x" << cols << " (" << expected
       << " bytes) but holds " << size << " bytes";
    throw InputError(os.str());
  }
  if (rows == 0 || cols == 0) throw InputError("'" + path + "' declares an empty matrix");

  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::vector<uint64_t> buf(rows);
  for (uint64_t j = 0; j < cols; ++j) {
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(rows * 8));
    for (uint64_t i = 0; i < rows; ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = from_le_double(buf[i]);
    }
  }
  if (!is) throw InputError("read failure on '" + path + "'");
  return m;
}

void write_matrix_binary(const std::string& path, const Matrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open '" + path + "' for writing");
  uint32_t dims[2] = {to_le32(static_cast<uint32_t>(m.rows())),
                      to_le32(static_cast<uint32_t>(m.cols()))};
  os.write(reinterpret_cast<const char*>(dims), 8);
  std::vector<uint64_t> buf(static_cast<size_t>(m.rows()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) buf[static_cast<size_t>(i)] = to_le_bits(m(i, j));
    os.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * 8));
  }
  if (!os) throw InputError("write failure on '" + path + "'");
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open '" + path + "' for reading");
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      double value;
      auto res = std::from_chars(p, end, value);
      if (res.ec != std::errc()) {
        std::ostringstream os;
        os << "'" << path << "' line " << line_no << ": cannot parse number at '"
           << std::string(p, std::min<size_t>(static_cast<size_t>(end - p), 12)) << "'";
        throw InputError(os.str());
      }
      row.push_back(value);
      p = res.ptr;
      if (p == end) break;
      if (*p != ',') {
        std::ostringstream os;
        os << "'" << path << "' line " << line_no << ": expected ',' after column "
           << row.size();
        throw InputError(os.str());
      }
      ++p;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream os;
      os << "'" << path << "' line " << line_no << ": " << row.size()
         << " columns, expected " << rows.front().size();
      throw InputError(os.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("'" + path + "' holds no data rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open '" + path + "' for writing");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
  if (!os) throw InputError("write failure on '" + path + "'");
}

Matrix read_matrix(const std::string& path) {
  return ends_with_csv(path) ? read_matrix_csv(path) : read_matrix_binary(path);
}

void write_matrix(const std::string& path, const Matrix& m) {
  if (ends_with_csv(path)) {
    write_matrix_csv(path, m);
  } else {
    write_matrix_binary(path, m);
  }
}

Vector read_vector(const std::string& path) {
  Matrix m = read_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  std::ostringstream os;
  os << "'" << path << "' is " << m.rows() << "x" << m.cols()
     << "; a vector needs one row or one column";
  throw InputError(os.str());
}

void write_vector(const std::string& path, const Vector& v) { write_matrix(path, v); }

}  // namespace sbl
