#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tagl/dataset.hpp"
#include "tagl/mask_plan.hpp"

namespace tagl {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

enum class SpanKind : std::uint8_t { OneHot, Continuous };

// Columns [offset, offset + width) of an encoded row belong to `attribute`.
struct ColumnSpan {
  std::size_t attribute = 0;
  std::size_t offset = 0;
  std::size_t width = 0;
  SpanKind kind = SpanKind::OneHot;

  bool operator==(const ColumnSpan&) const = default;
};

struct EncodedMatrix {
  Matrix values;
  std::vector<ColumnSpan> spans;
};

// Maps mixed rows to dense real rows: a categorical attribute becomes a
// one-hot span, a continuous attribute a single column (optionally z-scored
// with training statistics). Missing or masked cells encode as zeros.
class OneHotEncoder {
 public:
  OneHotEncoder() = default;
  // Raw continuous columns (no standardisation).
  explicit OneHotEncoder(const Schema& schema);
  // Continuous columns z-scored by the training mean and sample deviation.
  static OneHotEncoder fit_standardized(const Dataset& train);

  const Schema& schema() const { return schema_; }
  std::size_t width() const { return width_; }
  const std::vector<ColumnSpan>& spans() const { return spans_; }
  const ColumnSpan& span(std::size_t attribute) const { return spans_[attribute]; }
  bool standardized() const { return standardized_; }

  EncodedMatrix encode(const Dataset& ds, const MaskPlan* plan = nullptr) const;

  // Writes one row into `out` (size width()). Attributes listed in
  // `zeroed` (sorted) are encoded as zeros regardless of their value.
  void encode_row(std::span<const Cell> row,
                  std::span<const std::uint32_t> zeroed,
                  std::span<double> out) const;

  // Inverse of encode for unmasked rows: arg-max per one-hot span (an
  // all-zero span decodes to Missing), de-standardised continuous values.
  Dataset decode(const EncodedMatrix& m) const;

  double to_model_scale(std::size_t attribute, double value) const;
  double from_model_scale(std::size_t attribute, double value) const;

  std::string to_json() const;
  static OneHotEncoder from_json(const std::string& text);

 private:
  void build_spans();

  Schema schema_;
  std::vector<ColumnSpan> spans_;
  std::size_t width_ = 0;
  bool standardized_ = false;
  std::vector<double> means_;
  std::vector<double> scales_;
};

// Encoding with raw continuous columns.
EncodedMatrix encode_one_hot(const Dataset& ds, const MaskPlan* plan = nullptr);

}  // namespace tagl
