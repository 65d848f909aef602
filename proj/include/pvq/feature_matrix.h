#ifndef PVQ_FEATURE_MATRIX_H_
#define PVQ_FEATURE_MATRIX_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "pvq/matrix.h"

namespace pvq {

/// Frames x named dimensions. Values are single precision, which is also the
/// on-disk precision, so a binary round trip is exact.
struct FeatureMatrix {
  Matrix<float> values;
  std::vector<std::string> columns;

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }

  /// Copies columns [first, first + count) into a new matrix.
  FeatureMatrix slice(std::size_t first, std::size_t count) const;
};

/// Side-by-side concatenation. Row counts must agree exactly; a mismatch is a
/// kInternal error, never a truncation.
FeatureMatrix hconcat(const std::vector<const FeatureMatrix*>& parts);

enum class MatrixFormat { kBinary, kCsv };

/// Binary (.pft): "PFT1", rows and cols as little-endian u32, then row-major
/// little-endian f32. CSV: header of column names, 9 significant digits.
void write_matrix(const FeatureMatrix& m, const std::filesystem::path& path,
                  MatrixFormat format);

/// Detects the format from the leading magic. Binary files carry no column
/// names; columns come back as "c0", "c1", ...
FeatureMatrix read_matrix(const std::filesystem::path& path);

std::vector<std::string> generic_column_names(std::size_t count);

}  // namespace pvq

#endif  // PVQ_FEATURE_MATRIX_H_
