#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tagl {

// Which attributes of each instance are hidden (and become prediction
// targets). Training plans additionally flag a validation subset of the
// masked attributes.
class MaskPlan {
 public:
  MaskPlan() = default;
  MaskPlan(std::size_t num_instances, std::size_t num_attributes, double rate,
           std::uint64_t seed);

  std::size_t num_instances() const { return masked_.size(); }
  std::size_t num_attributes() const { return num_attributes_; }
  double rate() const { return rate_; }
  std::uint64_t seed() const { return seed_; }
  bool has_validation() const { return has_validation_; }

  // Sorted, duplicate-free.
  std::span<const std::uint32_t> masked(std::size_t instance) const {
    return masked_[instance];
  }
  // Sorted subset of masked(instance); empty for test plans.
  std::span<const std::uint32_t> validation(std::size_t instance) const {
    return has_validation_ ? std::span<const std::uint32_t>(validation_[instance])
                           : std::span<const std::uint32_t>();
  }
  bool is_masked(std::size_t instance, std::uint32_t attribute) const;
  bool is_validation(std::size_t instance, std::uint32_t attribute) const;

  std::size_t total_masked() const;

  void set_masked(std::size_t instance, std::vector<std::uint32_t> attributes);
  void set_validation(std::size_t instance, std::vector<std::uint32_t> attributes);

  // Restricts the plan to instances [begin, end), renumbered from 0.
  MaskPlan slice(std::size_t begin, std::size_t end) const;

  bool operator==(const MaskPlan&) const = default;

 private:
  std::size_t num_attributes_ = 0;
  double rate_ = 0.0;
  std::uint64_t seed_ = 0;
  bool has_validation_ = false;
  std::vector<std::vector<std::uint32_t>> masked_;
  std::vector<std::vector<std::uint32_t>> validation_;
};

// ceil(rate * J), robust to representation error (0.1 * 30 is not 3 in
// binary floating point).
std::size_t masked_count(std::size_t num_attributes, double rate);

// Per instance, ceil(rate * J) attributes drawn uniformly without
// replacement. Instance i draws from derive_seed(seed, mask stream, i), so
// any sub-range can be regenerated independently. Throws InvalidArgument if
// the count would hide every attribute.
MaskPlan make_mask_plan(std::size_t num_instances, std::size_t num_attributes,
                        double rate, std::uint64_t seed);

// Marks ceil(fraction * |masked|) of each instance's masked attributes as
// validation targets.
MaskPlan select_validation_targets(const MaskPlan& plan, double fraction,
                                   std::uint64_t seed);

inline constexpr double kTestRates[] = {0.10, 0.20, 0.40, 0.60, 0.80};
inline constexpr double kTrainMaskRate = 0.20;
inline constexpr double kValidationFraction = 0.25;

// One independent plan per test rate, each from its own sub-seed.
std::vector<MaskPlan> test_mask_schedule(std::size_t num_instances,
                                         std::size_t num_attributes,
                                         std::uint64_t seed);

// Line-oriented text: a header line
//   maskplan <n> <J> <rate> <seed> <has_validation>
// then one line per instance
//   <id> <masked,comma,separated> <validation flags 0/1, comma separated>
// An instance with no masked attributes writes "-" in both columns.
void write_mask_plan(const MaskPlan& plan, std::ostream& out);
MaskPlan read_mask_plan(std::istream& in);

}  // namespace tagl
