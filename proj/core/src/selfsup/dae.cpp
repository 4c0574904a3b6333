#include "tagl/selfsup/dae.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common.hpp"
#include "tagl/csv.hpp"
#include "tagl/error.hpp"
#include "tagl/rng.hpp"

namespace tagl {

DaeModel train_dae(const Dataset& train, const TrainConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  detail::Prepared data = detail::prepare(train);
  const std::size_t n = data.n, J = data.J;
  if (J < 2) throw InvalidArgument("denoising autoencoder needs at least two attributes");
  const auto& spans = data.encoder.spans();
  const std::size_t masked = masked_count(J, cfg.mask_rate);
  if (!cfg.full_reconstruction &&
      masked <= masked_count(masked, cfg.validation_fraction)) {
    throw InvalidArgument("mask rate " + std::to_string(cfg.mask_rate) + " on " + std::to_string(J) +
                          " attributes masks only validation targets; nothing to train on");
  }

  DaeModel model;
  model.encoder_ = data.encoder;
  model.config_ = cfg;
  model.dropout_.keep.assign(cfg.hidden.size(), 1.0 - cfg.dropout);
  model.dropout_.active = cfg.dropout > 0.0;
  model.net_ = nn::make_network(data.encoder.width(), cfg.hidden, spans);
  nn::initialize(model.net_, seed);
  nn::Network& net = model.net_;
  auto adam = nn::AdamState::for_network(net, cfg.learning_rate);
  detail::EarlyStopping stop(cfg.patience);
  nn::Network best = net;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const std::uint64_t es = derive_seed(seed, stream::kTrain, epoch);
    const MaskPlan plan = detail::epoch_plan(n, J, cfg, es);
    const auto order = detail::epoch_order(n, es);
    double loss_sum = 0.0, cells = 0.0;
    for (std::size_t start = 0, b = 0; start < n; start += cfg.batch_size, ++b) {
      const std::size_t rows = std::min(cfg.batch_size, n - start);
      Matrix input(Eigen::Index(rows), data.x.cols()), target(Eigen::Index(rows), data.x.cols());
      Matrix weight = Matrix::Zero(Eigen::Index(rows), Eigen::Index(J));
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t i = order[start + r];
        input.row(Eigen::Index(r)) = data.x.row(Eigen::Index(i));
        target.row(Eigen::Index(r)) = data.x.row(Eigen::Index(i));
        for (std::uint32_t a = 0; a < J; ++a) {
          const bool masked = plan.is_masked(i, a);
          if (masked) detail::zero_span(input, Eigen::Index(r), spans[a]);
          const bool scored = data.is_observed(i, a) && !plan.is_validation(i, a) &&
                              (masked || cfg.full_reconstruction);
          if (scored) {
            weight(Eigen::Index(r), Eigen::Index(a)) = 1.0 / double(rows);
            cells += 1.0;
          }
        }
      }
      auto f = nn::forward(net, input, model.dropout_, derive_seed(es, stream::kDropout, b));
      auto loss = nn::head_loss(net, f.outputs, target, weight);
      if (!std::isfinite(loss.loss)) {
        throw TrainingError("DAE loss became non-finite at epoch " + std::to_string(epoch) +
                            ", batch " + std::to_string(b) + " (learning rate " +
                            format_real(cfg.learning_rate) + ")");
      }
      loss_sum += loss.loss * double(rows);
      nn::adam_step(adam, net, nn::backward(net, f.cache, loss.grad));
    }

    Matrix input = data.x;
    Matrix weight = Matrix::Zero(Eigen::Index(n), Eigen::Index(J));
    double val_cells = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::uint32_t a = 0; a < J; ++a) {
        if (plan.is_masked(i, a)) detail::zero_span(input, Eigen::Index(i), spans[a]);
        if (plan.is_validation(i, a) && data.is_observed(i, a)) {
          weight(Eigen::Index(i), Eigen::Index(a)) = 1.0;
          val_cells += 1.0;
        }
      }
    auto f = nn::forward(net, input, nn::DropoutSpec::none(), 0);
    const double val_sum = nn::head_loss(net, f.outputs, data.x, weight).loss;
    const double train_loss = cells > 0 ? loss_sum / cells : 0.0;
    const double val_loss = val_cells > 0 ? val_sum / val_cells : train_loss;
    model.report_.train_loss.push_back(train_loss);
    model.report_.validation_loss.push_back(val_loss);
    if (stop.update(val_loss, epoch)) best = net;
    if (stop.should_stop()) break;
  }
  net = std::move(best);
  model.report_.best_epoch = stop.best_epoch();
  model.report_.best_validation_loss = stop.best();
  return model;
}

std::vector<Cell> DaeModel::impute(std::span<const Cell> row, std::span<const std::uint32_t> targets,
                                   const ImputationConfig& cfg, std::uint64_t seed) const {
  cfg.validate();
  if (row.size() != encoder_.schema().size()) throw InvalidArgument("row has the wrong width");
  Matrix x(1, Eigen::Index(encoder_.width()));
  encoder_.encode_row(row, targets, std::span<double>(x.data(), encoder_.width()));
  std::vector<std::vector<Cell>> samples(targets.size());
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    const auto out = nn::forward(net_, x, dropout_, derive_seed(seed, stream::kDropout, s)).outputs;
    const std::span<const double> o(out.data(), std::size_t(out.cols()));
    for (std::size_t k = 0; k < targets.size(); ++k)
      samples[k].push_back(detail::decode_head(encoder_, o, targets[k]));
  }
  std::vector<Cell> result;
  result.reserve(targets.size());
  for (const auto& s : samples) result.push_back(aggregate_samples(s));
  return result;
}

std::vector<Cell> DaeModel::predict_instance(std::span<const Cell> row,
                                             std::span<const std::uint32_t> masked,
                                             std::uint64_t seed) const {
  return impute(row, masked, imputation_, seed);
}

void DaeModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nn::save_network(net_, dir / "network.bin");
  nlohmann::json j = {{"model", "dae"},
                      {"encoder", nlohmann::json::parse(encoder_.to_json())},
                      {"config", nlohmann::json::parse(config_.to_json())},
                      {"dropout", {{"keep", dropout_.keep}, {"active", dropout_.active}}},
                      {"imputation", {{"samples", imputation_.samples}}},
                      {"report", detail::report_to_json(report_)}};
  detail::write_text(dir / "model.json", j.dump(2));
}

DaeModel DaeModel::load(const std::filesystem::path& dir) {
  DaeModel m;
  try {
    auto j = nlohmann::json::parse(detail::read_text(dir / "model.json"));
    if (j.at("model") != "dae") throw SchemaError("model.json does not describe a dae model");
    m.encoder_ = OneHotEncoder::from_json(j.at("encoder").dump());
    m.config_ = TrainConfig::from_json(j.at("config").dump());
    m.dropout_.keep = j.at("dropout").at("keep").get<std::vector<double>>();
    m.dropout_.active = j.at("dropout").at("active").get<bool>();
    m.imputation_.samples = j.at("imputation").at("samples").get<std::size_t>();
    m.report_ = detail::report_from_json(j.at("report"));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("model.json: ") + e.what());
  }
  m.net_ = nn::load_network(dir / "network.bin");
  if (m.net_.input_width() != m.encoder_.width()) throw SchemaError("network does not match encoder");
  m.dropout_.validate(m.net_.layers.size() - 1);
  return m;
}

DaeSearchResult search_dae(const Dataset& train, const TrainConfig& base, const SearchSpace& space,
                           std::size_t draws, std::uint64_t seed) {
  DaeSearchResult r;
  r.tried = draw_configs(space, base, draws, seed);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < r.tried.size(); ++k) {
    DaeModel m = train_dae(train, r.tried[k], seed);
    const double v = m.report().best_validation_loss;
    r.validation_loss.push_back(v);
    if (k == 0 || v < best) {
      best = v;
      r.best = k;
      r.model = std::move(m);
    }
  }
  return r;
}

}  // namespace tagl
