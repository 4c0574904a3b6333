#include "tagl/selfsup/made.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "common.hpp"
#include "tagl/csv.hpp"
#include "tagl/error.hpp"

namespace tagl {

Ordering Ordering::identity(std::size_t J) {
  std::vector<std::uint32_t> o(J);
  std::iota(o.begin(), o.end(), 0u);
  return from_order(std::move(o));
}

Ordering Ordering::from_order(std::vector<std::uint32_t> order) {
  Ordering t;
  t.position.assign(order.size(), std::uint32_t(order.size()));
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] >= order.size() || t.position[order[k]] != order.size()) {
      throw InvalidArgument("ordering is not a permutation");
    }
    t.position[order[k]] = std::uint32_t(k);
  }
  t.order = std::move(order);
  return t;
}

Ordering Ordering::random(std::size_t J, Rng& rng) {
  std::vector<std::uint32_t> o(J);
  std::iota(o.begin(), o.end(), 0u);
  shuffle(std::span<std::uint32_t>(o), rng);
  return from_order(std::move(o));
}

Ordering Ordering::random_split(std::vector<std::uint32_t> first, std::vector<std::uint32_t> last,
                                Rng& rng) {
  shuffle(std::span<std::uint32_t>(first), rng);
  shuffle(std::span<std::uint32_t>(last), rng);
  first.insert(first.end(), last.begin(), last.end());
  return from_order(std::move(first));
}

MadeMasks build_made_masks(const Ordering& ordering, const std::vector<std::size_t>& hidden,
                           const std::vector<ColumnSpan>& input_spans,
                           const std::vector<ColumnSpan>& output_spans, std::uint64_t seed) {
  const std::size_t J = ordering.size();
  if (J < 2) throw InvalidArgument("autoregressive masks need at least two attributes");
  if (input_spans.size() != J || output_spans.size() != J) {
    throw InvalidArgument("column spans do not match the ordering");
  }
  auto width_of = [](const std::vector<ColumnSpan>& spans) {
    std::size_t w = 0;
    for (const auto& s : spans) w = std::max(w, s.offset + s.width);
    return w;
  };
  std::vector<std::uint32_t> prev(width_of(input_spans));
  for (const auto& s : input_spans)
    for (std::size_t c = 0; c < s.width; ++c) prev[s.offset + c] = ordering.position[s.attribute];

  Rng rng(seed);
  MadeMasks out;
  const std::uint32_t hi = std::uint32_t(J - 2);
  for (std::size_t width : hidden) {
    const std::uint32_t lo = std::min(*std::min_element(prev.begin(), prev.end()), hi);
    const std::size_t range = hi - lo + 1;
    std::vector<std::uint32_t> deg(width);
    std::uniform_int_distribution<std::uint32_t> pick(lo, hi);
    for (std::size_t k = 0; k < width; ++k) deg[k] = k < range ? lo + std::uint32_t(k) : pick(rng);
    if (width >= range) shuffle(std::span<std::uint32_t>(deg), rng);
    Matrix m(Eigen::Index(width), Eigen::Index(prev.size()));
    for (std::size_t k = 0; k < width; ++k)
      for (std::size_t c = 0; c < prev.size(); ++c)
        m(Eigen::Index(k), Eigen::Index(c)) = deg[k] >= prev[c] ? 1.0 : 0.0;
    out.masks.push_back(std::move(m));
    out.degrees.push_back(deg);
    prev = std::move(deg);
  }
  // Without hidden layers the output connects straight to input columns,
  // whose degree t(a) must then be strictly smaller than t(b).
  Matrix m = Matrix::Zero(Eigen::Index(width_of(output_spans)), Eigen::Index(prev.size()));
  for (const auto& s : output_spans) {
    const std::uint32_t tb = ordering.position[s.attribute];
    for (std::size_t r = 0; r < s.width; ++r)
      for (std::size_t c = 0; c < prev.size(); ++c)
        m(Eigen::Index(s.offset + r), Eigen::Index(c)) = tb > prev[c] ? 1.0 : 0.0;
  }
  out.masks.push_back(std::move(m));
  return out;
}

std::vector<std::vector<double>> dependency_paths(const nn::Network& net,
                                                  const std::vector<ColumnSpan>& input_spans) {
  Matrix paths = Matrix::Identity(Eigen::Index(net.input_width()), Eigen::Index(net.input_width()));
  for (const auto& l : net.layers) {
    const Matrix m = l.mask ? *l.mask : Matrix::Ones(l.weight.rows(), l.weight.cols());
    paths = m * paths;
  }
  std::vector<std::vector<double>> dep(input_spans.size(), std::vector<double>(net.heads.size(), 0.0));
  for (const auto& a : input_spans)
    for (const auto& b : net.heads)
      dep[a.attribute][b.attribute] = paths.block(Eigen::Index(b.offset), Eigen::Index(a.offset),
                                                  Eigen::Index(b.width), Eigen::Index(a.width))
                                          .sum();
  return dep;
}

namespace {

void install_masks(nn::Network& net, const Ordering& ordering, const std::vector<std::size_t>& hidden,
                   const std::vector<ColumnSpan>& spans, std::uint64_t seed) {
  if (ordering.size() < 2) {
    // Single attribute: no predecessors, so the first layer is cut off
    // entirely and the head sees only biases.
    net.layers.front().mask = Matrix::Zero(net.layers.front().weight.rows(),
                                           net.layers.front().weight.cols());
    return;
  }
  MadeMasks masks = build_made_masks(ordering, hidden, spans, spans, seed);
  for (std::size_t l = 0; l < net.layers.size(); ++l) net.layers[l].mask = std::move(masks.masks[l]);
}

void strip_masks(nn::Network& net) {
  for (auto& l : net.layers) l.mask.reset();
}

}  // namespace

nn::Network MadeModel::masked_network(const Ordering& ordering, std::uint64_t mask_seed) const {
  if (ordering.size() != num_attributes()) throw InvalidArgument("ordering has the wrong length");
  nn::Network net = net_;
  install_masks(net, ordering, config_.hidden, encoder_.spans(), mask_seed);
  return net;
}

MadeModel train_made(const Dataset& train, const TrainConfig& cfg, std::uint64_t seed,
                     const MaskObserver& observer) {
  cfg.validate();
  detail::Prepared data = detail::prepare(train);
  const std::size_t n = data.n, J = data.J;
  if (J == 0) throw InvalidArgument("cannot train on a dataset without attributes");
  const auto& spans = data.encoder.spans();

  MadeModel model;
  model.encoder_ = data.encoder;
  model.config_ = cfg;
  model.net_ = nn::make_network(data.encoder.width(), cfg.hidden, spans);
  nn::initialize(model.net_, seed);
  nn::Network& net = model.net_;
  auto adam = nn::AdamState::for_network(net, cfg.learning_rate);
  detail::EarlyStopping stop(cfg.patience);
  nn::Network best = net;

  // Validation instances: a fixed subsample.
  std::vector<std::size_t> val_rows = detail::epoch_order(n, derive_seed(seed, stream::kValidation));
  if (cfg.validation_subsample && val_rows.size() > cfg.validation_subsample) {
    val_rows.resize(cfg.validation_subsample);
  }
  std::sort(val_rows.begin(), val_rows.end());

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const std::uint64_t es = derive_seed(seed, stream::kTrain, epoch);
    MaskPlan plan = J >= 2 ? detail::epoch_plan(n, J, cfg, es) : MaskPlan(n, J, cfg.mask_rate, es);
    const auto order = detail::epoch_order(n, es);
    double loss_sum = 0.0, cells = 0.0;
    for (std::size_t start = 0, b = 0; start < n; start += cfg.batch_size, ++b) {
      const std::size_t rows = std::min(cfg.batch_size, n - start);
      Rng orng(derive_seed(es, stream::kOrdering, b));
      const Ordering ordering = Ordering::random(J, orng);
      install_masks(net, ordering, cfg.hidden, spans, derive_seed(es, stream::kInit, b));
      if (observer) observer(ordering, net);

      Matrix input(Eigen::Index(rows), data.x.cols()), target(Eigen::Index(rows), data.x.cols());
      Matrix weight = Matrix::Zero(Eigen::Index(rows), Eigen::Index(J));
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t i = order[start + r];
        input.row(Eigen::Index(r)) = data.x.row(Eigen::Index(i));
        target.row(Eigen::Index(r)) = data.x.row(Eigen::Index(i));
        for (std::uint32_t a = 0; a < J; ++a) {
          // Validation cells stay visible as inputs: the masks already keep
          // every head blind to its own value, so excluding them from the
          // loss is enough to hold them out.
          const bool val = plan.is_validation(i, a);
          bool scored = data.is_observed(i, a) && !val;
          if (cfg.masked_only) scored = scored && plan.is_masked(i, a);
          if (scored) {
            weight(Eigen::Index(r), Eigen::Index(a)) = 1.0 / double(rows);
            cells += 1.0;
          }
        }
      }
      auto f = nn::forward(net, input, nn::DropoutSpec::none(), 0);
      auto loss = nn::head_loss(net, f.outputs, target, weight);
      if (!std::isfinite(loss.loss)) {
        throw TrainingError("MADE loss became non-finite at epoch " + std::to_string(epoch) +
                            ", batch " + std::to_string(b) + " (learning rate " +
                            format_real(cfg.learning_rate) + ")");
      }
      loss_sum += loss.loss * double(rows);
      nn::adam_step(adam, net, nn::backward(net, f.cache, loss.grad));
    }

    // Validation: each instance's validation targets go last in its ordering.
    double val_sum = 0.0, val_cells = 0.0;
    if (J >= 2) {
      Matrix input(1, data.x.cols()), target(1, data.x.cols()), weight(1, Eigen::Index(J));
      for (std::size_t i : val_rows) {
        std::vector<std::uint32_t> first, last;
        for (std::uint32_t a = 0; a < J; ++a) (plan.is_validation(i, a) ? last : first).push_back(a);
        Rng vrng(derive_seed(es, stream::kValidation, i));
        const Ordering ordering = Ordering::random_split(first, last, vrng);
        install_masks(net, ordering, cfg.hidden, spans, derive_seed(es, stream::kInit, n + i));
        if (observer) observer(ordering, net);
        input.row(0) = data.x.row(Eigen::Index(i));
        target.row(0) = data.x.row(Eigen::Index(i));
        weight.setZero();
        for (auto a : last) {
          detail::zero_span(input, 0, spans[a]);
          if (data.is_observed(i, a)) {
            weight(0, Eigen::Index(a)) = 1.0;
            val_cells += 1.0;
          }
        }
        auto f = nn::forward(net, input, nn::DropoutSpec::none(), 0);
        val_sum += nn::head_loss(net, f.outputs, target, weight).loss;
      }
    } else {
      auto f = nn::forward(net, data.x, nn::DropoutSpec::none(), 0);
      Matrix weight(Eigen::Index(n), 1);
      for (std::size_t i = 0; i < n; ++i) {
        weight(Eigen::Index(i), 0) = data.is_observed(i, 0) ? 1.0 : 0.0;
        val_cells += weight(Eigen::Index(i), 0);
      }
      val_sum = nn::head_loss(net, f.outputs, data.x, weight).loss;
    }
    const double train_loss = cells > 0 ? loss_sum / cells : 0.0;
    const double val_loss = val_cells > 0 ? val_sum / val_cells : train_loss;
    model.report_.train_loss.push_back(train_loss);
    model.report_.validation_loss.push_back(val_loss);
    if (stop.update(val_loss, epoch)) best = net;
    if (stop.should_stop()) break;
  }
  net = std::move(best);
  strip_masks(net);
  model.report_.best_epoch = stop.best_epoch();
  model.report_.best_validation_loss = stop.best();
  model.observer_ = observer;
  return model;
}

std::vector<Cell> MadeModel::impute(std::span<const Cell> row, std::span<const std::uint32_t> targets,
                                    const ImputationConfig& cfg, std::uint64_t seed) const {
  cfg.validate();
  const std::size_t J = num_attributes();
  if (row.size() != J) throw InvalidArgument("row has the wrong width");
  std::vector<std::uint32_t> observed;
  for (std::uint32_t a = 0; a < J; ++a)
    if (!std::binary_search(targets.begin(), targets.end(), a)) observed.push_back(a);
  std::vector<std::uint32_t> target_list(targets.begin(), targets.end());
  if (observed.size() + target_list.size() != J) throw InvalidArgument("targets must be sorted and distinct");

  Matrix base(1, Eigen::Index(encoder_.width()));
  encoder_.encode_row(row, targets, std::span<double>(base.data(), encoder_.width()));
  std::vector<std::vector<Cell>> samples(targets.size());
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    Rng rng(derive_seed(seed, stream::kSample, s));
    const Ordering ordering = Ordering::random_split(observed, target_list, rng);
    const nn::Network net = masked_network(ordering, derive_seed(seed, stream::kInit, s));
    if (observer_) observer_(ordering, net);
    Matrix x = base;
    for (std::size_t pos = observed.size(); pos < J; ++pos) {
      const std::uint32_t b = ordering.order[pos];
      const auto out = nn::forward(net, x, nn::DropoutSpec::none(), 0).outputs;
      const ColumnSpan& span = encoder_.span(b);
      const auto off = Eigen::Index(span.offset);
      Cell value;
      if (span.kind == SpanKind::Continuous) {
        x(0, off) = out(0, off);
        value = Cell::continuous(encoder_.from_model_scale(b, out(0, off)));
      } else {
        std::discrete_distribution<std::uint32_t> pick(out.data() + off, out.data() + off + Eigen::Index(span.width));
        const std::uint32_t k = pick(rng);
        x.row(0).segment(off, Eigen::Index(span.width)).setZero();
        x(0, off + Eigen::Index(k)) = 1.0;
        value = Cell::categorical(k);
      }
      const auto idx = std::size_t(std::lower_bound(targets.begin(), targets.end(), b) - targets.begin());
      samples[idx].push_back(value);
    }
  }
  std::vector<Cell> out;
  out.reserve(targets.size());
  for (const auto& s : samples) out.push_back(aggregate_samples(s));
  return out;
}

std::vector<Cell> MadeModel::predict_instance(std::span<const Cell> row,
                                              std::span<const std::uint32_t> masked,
                                              std::uint64_t seed) const {
  return impute(row, masked, imputation_, seed);
}

void MadeModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nn::save_network(net_, dir / "network.bin");
  nlohmann::json j = {{"model", "made"},
                      {"encoder", nlohmann::json::parse(encoder_.to_json())},
                      {"config", nlohmann::json::parse(config_.to_json())},
                      {"imputation", {{"samples", imputation_.samples}}},
                      {"ordering_policy", "per-sample: shuffled observed then shuffled targets"},
                      {"report", detail::report_to_json(report_)}};
  detail::write_text(dir / "model.json", j.dump(2));
}

MadeModel MadeModel::load(const std::filesystem::path& dir) {
  MadeModel m;
  try {
    auto j = nlohmann::json::parse(detail::read_text(dir / "model.json"));
    if (j.at("model") != "made") throw SchemaError("model.json does not describe a made model");
    m.encoder_ = OneHotEncoder::from_json(j.at("encoder").dump());
    m.config_ = TrainConfig::from_json(j.at("config").dump());
    m.imputation_.samples = j.at("imputation").at("samples").get<std::size_t>();
    m.report_ = detail::report_from_json(j.at("report"));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("model.json: ") + e.what());
  }
  m.net_ = nn::load_network(dir / "network.bin");
  if (m.net_.input_width() != m.encoder_.width()) throw SchemaError("network does not match encoder");
  return m;
}

MadeSearchResult search_made(const Dataset& train, const TrainConfig& base, const SearchSpace& space,
                             std::size_t draws, std::uint64_t seed) {
  MadeSearchResult r;
  r.tried = draw_configs(space, base, draws, seed);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < r.tried.size(); ++k) {
    MadeModel m = train_made(train, r.tried[k], seed);
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
