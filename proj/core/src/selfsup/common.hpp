#pragma once

// Shared pieces of the self-supervised trainers.

#include <filesystem>
#include <limits>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

#include "tagl/dataset.hpp"
#include "tagl/encoding.hpp"
#include "tagl/mask_plan.hpp"
#include "tagl/nn/network.hpp"
#include "tagl/selfsup/config.hpp"

namespace tagl::detail {

struct Prepared {
  OneHotEncoder encoder;
  Matrix x;  // encoded training rows, Missing as zeros
  std::vector<std::uint8_t> observed;  // n x J
  std::size_t n = 0;
  std::size_t J = 0;

  bool is_observed(std::size_t i, std::size_t j) const { return observed[i * J + j] != 0; }
};

Prepared prepare(const Dataset& train);

// Zeroes the columns of attribute `span` in row `r` of `m`.
inline void zero_span(Matrix& m, Eigen::Index r, const ColumnSpan& span) {
  m.row(r).segment(Eigen::Index(span.offset), Eigen::Index(span.width)).setZero();
}

// Fresh training plan (masks plus validation targets) for one epoch.
MaskPlan epoch_plan(std::size_t n, std::size_t J, const TrainConfig& cfg, std::uint64_t epoch_seed);

// Row order for one epoch.
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t epoch_seed);

// Arg-max of a softmax head (lowest index on ties) or the de-standardised
// value of a linear head.
Cell decode_head(const OneHotEncoder& enc, std::span<const double> outputs, std::size_t attribute);

class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}
  // True if `loss` is a new best.
  bool update(double loss, std::size_t epoch) {
    if (loss < best_) {
      best_ = loss;
      best_epoch_ = epoch;
      bad_ = 0;
      return true;
    }
    ++bad_;
    return false;
  }
  bool should_stop() const { return bad_ > patience_; }
  double best() const { return best_; }
  std::size_t best_epoch() const { return best_epoch_; }

 private:
  std::size_t patience_;
  std::size_t bad_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t best_epoch_ = 0;
};

nlohmann::json report_to_json(const TrainingReport& r);
TrainingReport report_from_json(const nlohmann::json& j);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace tagl::detail
