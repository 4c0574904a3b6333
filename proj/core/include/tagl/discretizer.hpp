#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tagl/dataset.hpp"

namespace tagl {

// Equal-frequency bins for one continuous attribute. Each bin remembers the
// closed range of training values that fell into it and their median, which
// is what a discretizing model emits when asked for a real value.
struct AttributeBins {
  std::size_t attribute = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> medians;

  std::size_t num_bins() const { return medians.size(); }
  // Values between two bins go to the nearer one (midpoint split); values
  // outside the training range clamp to the outer bins.
  std::size_t bin_of(double value) const;
};

// Brings a sorted value list into bins. Cut points sit at positions
// floor(i * n / bins) moved to the nearest change between distinct values;
// fewer distinct values than bins gives one bin per distinct value.
AttributeBins fit_bins(std::vector<double> values, std::size_t bins);

class Discretizer {
 public:
  Discretizer() = default;

  // Fits every continuous attribute of `train`, ignoring Missing cells.
  static Discretizer fit(const Dataset& train, std::size_t bins = 5);

  // Continuous cells become bin-index categorical cells; Missing stays
  // Missing; categorical columns pass through.
  Dataset apply(const Dataset& ds) const;

  Schema output_schema(const Schema& input) const;

  const AttributeBins* bins_for(std::size_t attribute) const;
  bool is_binned(std::size_t attribute) const {
    return bins_for(attribute) != nullptr;
  }

  // Bin index -> training median of that bin.
  double median(std::size_t attribute, std::size_t bin) const;

  // Maps a cell of the discretized space back to the original space.
  Cell back_project(std::size_t attribute, const Cell& binned) const;

  const Schema& source_schema() const { return source_schema_; }
  std::size_t requested_bins() const { return requested_bins_; }

  std::string to_json() const;
  static Discretizer from_json(const std::string& text);

 private:
  Schema source_schema_;
  std::size_t requested_bins_ = 5;
  std::vector<std::optional<AttributeBins>> bins_;
};

}  // namespace tagl
