#include "pvq/feature_matrix.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "pvq/error.h"

namespace pvq {
namespace {

constexpr char kMagic[4] = {'P', 'F', 'T', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return fields;
}

FeatureMatrix read_binary(const std::filesystem::path& path,
                          const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 12) {
    throw Error(ErrorCode::kFormat, path.string() + ": truncated header");
  }
  const std::uint64_t rows = get_u32(bytes.data() + 4);
  const std::uint64_t cols = get_u32(bytes.data() + 8);
  // rows and cols are < 2^32 each, so the product cannot wrap in 64 bits.
  const std::uint64_t count = rows * cols;
  if (count > std::numeric_limits<std::size_t>::max() / sizeof(float) ||
      12 + count * sizeof(float) != bytes.size()) {
    throw Error(ErrorCode::kFormat,
                path.string() + ": header claims " + std::to_string(rows) + "x" +
                    std::to_string(cols) + " but file holds " +
                    std::to_string(bytes.size()) + " bytes");
  }
  FeatureMatrix m;
  m.values = Matrix<float>(rows, cols);
  auto data = m.values.data();
  for (std::size_t i = 0; i < count; ++i) {
    data[i] = std::bit_cast<float>(get_u32(bytes.data() + 12 + 4 * i));
  }
  m.columns = generic_column_names(cols);
  return m;
}

FeatureMatrix read_csv(const std::filesystem::path& path, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kFormat, path.string() + ": empty CSV file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  FeatureMatrix m;
  m.columns = line.empty() ? std::vector<std::string>{} : split(line, ',');
  const std::size_t cols = m.columns.size();

  std::vector<float> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != cols) {
      throw Error(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) +
                                          ": expected " + std::to_string(cols) +
                                          " fields, found " + std::to_string(fields.size()));
    }
    for (const auto& f : fields) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) +
                                            ": bad number '" + f + "'");
      }
      values.push_back(static_cast<float>(v));
    }
    ++rows;
  }
  m.values = Matrix<float>(rows, cols);
  std::copy(values.begin(), values.end(), m.values.data().begin());
  return m;
}

}  // namespace

std::vector<std::string> generic_column_names(std::size_t count) {
  std::vector<std::string> names;
  names.reserve(count);
  for (std::size_t i = 0; i < count; ++i) names.push_back("c" + std::to_string(i));
  return names;
}

FeatureMatrix FeatureMatrix::slice(std::size_t first, std::size_t count) const {
  if (first + count > cols()) {
    throw Error(ErrorCode::kInvalidArgument, "column slice out of range");
  }
  FeatureMatrix out;
  out.values = Matrix<float>(rows(), count);
  for (std::size_t r = 0; r < rows(); ++r) {
    const auto src = values.row(r);
    std::copy(src.begin() + first, src.begin() + first + count, out.values.row(r).begin());
  }
  out.columns.assign(columns.begin() + first, columns.begin() + first + count);
  return out;
}

FeatureMatrix hconcat(const std::vector<const FeatureMatrix*>& parts) {
  FeatureMatrix out;
  if (parts.empty()) return out;
  const std::size_t rows = parts.front()->rows();
  std::size_t cols = 0;
  for (const auto* p : parts) {
    if (p->rows() != rows) {
      throw Error(ErrorCode::kInternal,
                  "frame count mismatch between feature streams: " + std::to_string(rows) +
                      " vs " + std::to_string(p->rows()));
    }
    cols += p->cols();
    out.columns.insert(out.columns.end(), p->columns.begin(), p->columns.end());
  }
  out.values = Matrix<float>(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto dst = out.values.row(r).begin();
    for (const auto* p : parts) {
      const auto src = p->values.row(r);
      dst = std::copy(src.begin(), src.end(), dst);
    }
  }
  return out;
}

void write_matrix(const FeatureMatrix& m, const std::filesystem::path& path,
                  MatrixFormat format) {
  std::string out;
  if (format == MatrixFormat::kBinary) {
    constexpr std::size_t kMax = std::numeric_limits<std::uint32_t>::max();
    if (m.rows() > kMax || m.cols() > kMax) {
      throw Error(ErrorCode::kInvalidArgument, "matrix dimensions exceed 32 bits");
    }
    out.reserve(12 + 4 * m.values.data().size());
    out.append(kMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (float v : m.values.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  } else {
    const auto names = m.columns.size() == m.cols() ? m.columns : generic_column_names(m.cols());
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (c) out += ',';
      out += names[c];
    }
    out += '\n';
    char buf[32];
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const auto row = m.values.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(row[c]));
        out += buf;
      }
      out += '\n';
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, path.string() + ": cannot open for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIo, path.string() + ": write failed");
}

FeatureMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path.string() + ": cannot open file");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) {
    return read_binary(path, bytes);
  }
  if (bytes.size() >= 3 && std::memcmp(bytes.data(), "PFT", 3) == 0) {
    throw Error(ErrorCode::kFormat, path.string() + ": unsupported PFT version");
  }
  return read_csv(path, std::string(bytes.begin(), bytes.end()));
}

}  // namespace pvq
