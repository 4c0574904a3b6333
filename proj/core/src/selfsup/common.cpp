#include "common.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "tagl/error.hpp"
#include "tagl/rng.hpp"

namespace tagl::detail {

Prepared prepare(const Dataset& train) {
  if (train.num_rows() == 0) throw InvalidArgument("cannot train on an empty dataset");
  Prepared p;
  p.n = train.num_rows();
  p.J = train.num_attributes();
  p.encoder = OneHotEncoder::fit_standardized(train);
  p.x = p.encoder.encode(train).values;
  p.observed.resize(p.n * p.J);
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t j = 0; j < p.J; ++j) p.observed[i * p.J + j] = !train.at(i, j).is_missing();
  return p;
}

MaskPlan epoch_plan(std::size_t n, std::size_t J, const TrainConfig& cfg, std::uint64_t epoch_seed) {
  return select_validation_targets(
      make_mask_plan(n, J, cfg.mask_rate, derive_seed(epoch_seed, stream::kMask)),
      cfg.validation_fraction, derive_seed(epoch_seed, stream::kValidation));
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t epoch_seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(epoch_seed, stream::kSchedule));
  shuffle(std::span<std::size_t>(order), rng);
  return order;
}

Cell decode_head(const OneHotEncoder& enc, std::span<const double> outputs, std::size_t attribute) {
  const ColumnSpan& s = enc.span(attribute);
  if (s.kind == SpanKind::Continuous) {
    return Cell::continuous(enc.from_model_scale(attribute, outputs[s.offset]));
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.width; ++k)
    if (outputs[s.offset + k] > outputs[s.offset + best]) best = k;
  return Cell::categorical(static_cast<std::uint32_t>(best));
}

nlohmann::json report_to_json(const TrainingReport& r) {
  return {{"train_loss", r.train_loss},
          {"validation_loss", r.validation_loss},
          {"best_epoch", r.best_epoch},
          {"best_validation_loss", r.best_validation_loss}};
}

TrainingReport report_from_json(const nlohmann::json& j) {
  TrainingReport r;
  r.train_loss = j.at("train_loss").get<std::vector<double>>();
  r.validation_loss = j.at("validation_loss").get<std::vector<double>>();
  r.best_epoch = j.at("best_epoch").get<std::size_t>();
  r.best_validation_loss = j.at("best_validation_loss").get<double>();
  return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace tagl::detail
