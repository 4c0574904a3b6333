#include "tagl/mask_plan.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "tagl/csv.hpp"
#include "tagl/error.hpp"
#include "tagl/rng.hpp"

namespace tagl {

MaskPlan::MaskPlan(std::size_t num_instances, std::size_t num_attributes,
                   double rate, std::uint64_t seed)
    : num_attributes_(num_attributes),
      rate_(rate),
      seed_(seed),
      masked_(num_instances) {}

bool MaskPlan::is_masked(std::size_t instance, std::uint32_t attribute) const {
  const auto& m = masked_[instance];
  return std::binary_search(m.begin(), m.end(), attribute);
}

bool MaskPlan::is_validation(std::size_t instance,
                             std::uint32_t attribute) const {
  if (!has_validation_) return false;
  const auto& v = validation_[instance];
  return std::binary_search(v.begin(), v.end(), attribute);
}

std::size_t MaskPlan::total_masked() const {
  std::size_t total = 0;
  for (const auto& m : masked_) total += m.size();
  return total;
}

void MaskPlan::set_masked(std::size_t instance,
                          std::vector<std::uint32_t> attributes) {
  std::sort(attributes.begin(), attributes.end());
  if (std::adjacent_find(attributes.begin(), attributes.end()) !=
      attributes.end()) {
    throw InvalidArgument("masked attribute set has duplicates");
  }
  if (!attributes.empty() && attributes.back() >= num_attributes_) {
    throw InvalidArgument("masked attribute index out of range");
  }
  masked_.at(instance) = std::move(attributes);
}

void MaskPlan::set_validation(std::size_t instance,
                              std::vector<std::uint32_t> attributes) {
  std::sort(attributes.begin(), attributes.end());
  for (auto a : attributes) {
    if (!is_masked(instance, a)) {
      throw InvalidArgument("validation target must be a masked attribute");
    }
  }
  if (!has_validation_) {
    validation_.assign(masked_.size(), {});
    has_validation_ = true;
  }
  validation_.at(instance) = std::move(attributes);
}

MaskPlan MaskPlan::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > masked_.size()) {
    throw InvalidArgument("mask plan slice out of range");
  }
  MaskPlan out(end - begin, num_attributes_, rate_, seed_);
  for (std::size_t i = begin; i < end; ++i) out.masked_[i - begin] = masked_[i];
  if (has_validation_) {
    out.has_validation_ = true;
    out.validation_.assign(validation_.begin() + begin,
                           validation_.begin() + end);
  }
  return out;
}

std::size_t masked_count(std::size_t num_attributes, double rate) {
  const double raw = rate * static_cast<double>(num_attributes);
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

MaskPlan make_mask_plan(std::size_t num_instances, std::size_t num_attributes,
                        double rate, std::uint64_t seed) {
  if (!(rate > 0.0 && rate < 1.0)) {
    throw InvalidArgument("mask rate must lie in (0, 1)");
  }
  if (num_attributes < 1) throw InvalidArgument("need at least one attribute");
  const std::size_t k = masked_count(num_attributes, rate);
  if (k >= num_attributes) {
    throw InvalidArgument("mask rate " + format_real(rate) + " hides all " +
                          std::to_string(num_attributes) +
                          " attributes; at least one must stay observable");
  }
  MaskPlan plan(num_instances, num_attributes, rate, seed);
  for (std::size_t i = 0; i < num_instances; ++i) {
    Rng rng(derive_seed(seed, stream::kMask, i));
    plan.set_masked(i, sample_without_replacement(
                           static_cast<std::uint32_t>(num_attributes),
                           static_cast<std::uint32_t>(k), rng));
  }
  return plan;
}

MaskPlan select_validation_targets(const MaskPlan& plan, double fraction,
                                   std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("validation fraction must lie in (0, 1]");
  }
  MaskPlan out = plan;
  for (std::size_t i = 0; i < plan.num_instances(); ++i) {
    auto masked = plan.masked(i);
    const std::size_t k = masked_count(masked.size(), fraction);
    Rng rng(derive_seed(seed, stream::kValidation, i));
    auto picks = sample_without_replacement(
        static_cast<std::uint32_t>(masked.size()),
        static_cast<std::uint32_t>(k), rng);
    std::vector<std::uint32_t> chosen;
    chosen.reserve(k);
    for (auto p : picks) chosen.push_back(masked[p]);
    out.set_validation(i, std::move(chosen));
  }
  return out;
}

std::vector<MaskPlan> test_mask_schedule(std::size_t num_instances,
                                         std::size_t num_attributes,
                                         std::uint64_t seed) {
  if (num_attributes < 2) {
    throw InvalidArgument("test schedule needs at least two attributes");
  }
  std::vector<MaskPlan> plans;
  std::uint64_t r = 0;
  for (double rate : kTestRates) {
    plans.push_back(make_mask_plan(num_instances, num_attributes, rate,
                                   derive_seed(seed, stream::kSchedule, r++)));
  }
  return plans;
}

namespace {

std::string join(std::span<const std::uint32_t> v) {
  if (v.empty()) return "-";
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s.push_back(',');
    s += std::to_string(v[k]);
  }
  return s;
}

std::vector<std::uint32_t> parse_list(const std::string& s) {
  std::vector<std::uint32_t> out;
  if (s == "-") return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
  }
  return out;
}

}  // namespace

void write_mask_plan(const MaskPlan& plan, std::ostream& out) {
  out << "maskplan " << plan.num_instances() << ' ' << plan.num_attributes()
      << ' ' << format_real(plan.rate()) << ' ' << plan.seed() << ' '
      << (plan.has_validation() ? 1 : 0) << '\n';
  for (std::size_t i = 0; i < plan.num_instances(); ++i) {
    auto m = plan.masked(i);
    std::string flags;
    if (m.empty()) {
      flags = "-";
    } else {
      for (std::size_t k = 0; k < m.size(); ++k) {
        if (k) flags.push_back(',');
        flags.push_back(plan.is_validation(i, m[k]) ? '1' : '0');
      }
    }
    out << i << ' ' << join(m) << ' ' << flags << '\n';
  }
}

MaskPlan read_mask_plan(std::istream& in) {
  std::string tag;
  std::size_t n = 0, J = 0;
  std::string rate_text;
  std::uint64_t seed = 0;
  int has_validation = 0;
  if (!(in >> tag >> n >> J >> rate_text >> seed >> has_validation) ||
      tag != "maskplan") {
    throw StructuralError("mask plan: bad header");
  }
  MaskPlan plan(n, J, std::stod(rate_text), seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t id = 0;
    std::string masked, flags;
    if (!(in >> id >> masked >> flags) || id != i) {
      throw StructuralError("mask plan: bad line for instance " +
                            std::to_string(i));
    }
    auto m = parse_list(masked);
    auto f = parse_list(flags);
    if (f.size() != m.size()) {
      throw StructuralError("mask plan: flag count mismatch at instance " +
                            std::to_string(i));
    }
    plan.set_masked(i, m);
    if (has_validation) {
      std::vector<std::uint32_t> v;
      for (std::size_t k = 0; k < m.size(); ++k)
        if (f[k]) v.push_back(m[k]);
      plan.set_validation(i, std::move(v));
    }
  }
  return plan;
}

}  // namespace tagl
