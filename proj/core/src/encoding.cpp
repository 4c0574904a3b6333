#include "tagl/encoding.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "tagl/error.hpp"

namespace tagl {

OneHotEncoder::OneHotEncoder(const Schema& schema) : schema_(schema) {
  means_.assign(schema_.size(), 0.0);
  scales_.assign(schema_.size(), 1.0);
  build_spans();
}

void OneHotEncoder::build_spans() {
  spans_.clear();
  width_ = 0;
  for (const auto& a : schema_) {
    ColumnSpan s;
    s.attribute = a.index;
    s.offset = width_;
    if (a.is_categorical()) {
      s.width = a.cardinality();
      s.kind = SpanKind::OneHot;
    } else {
      s.width = 1;
      s.kind = SpanKind::Continuous;
    }
    width_ += s.width;
    spans_.push_back(s);
  }
}

OneHotEncoder OneHotEncoder::fit_standardized(const Dataset& train) {
  OneHotEncoder enc(train.schema());
  enc.standardized_ = true;
  for (std::size_t j = 0; j < train.num_attributes(); ++j) {
    if (!train.attribute(j).is_continuous()) continue;
    enc.means_[j] = mean(train, j);
    const double sd = sample_stddev(train, j);
    enc.scales_[j] = sd > 0.0 ? sd : 1.0;
  }
  return enc;
}

double OneHotEncoder::to_model_scale(std::size_t attribute, double value) const {
  return (value - means_[attribute]) / scales_[attribute];
}

double OneHotEncoder::from_model_scale(std::size_t attribute, double value) const {
  return value * scales_[attribute] + means_[attribute];
}

void OneHotEncoder::encode_row(std::span<const Cell> row,
                               std::span<const std::uint32_t> zeroed,
                               std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < schema_.size(); ++j) {
    const Cell& c = row[j];
    if (c.is_missing()) continue;
    if (std::binary_search(zeroed.begin(), zeroed.end(),
                           static_cast<std::uint32_t>(j))) {
      continue;
    }
    const ColumnSpan& s = spans_[j];
    if (s.kind == SpanKind::OneHot) {
      out[s.offset + c.category()] = 1.0;
    } else {
      out[s.offset] = to_model_scale(j, c.value());
    }
  }
}

EncodedMatrix OneHotEncoder::encode(const Dataset& ds, const MaskPlan* plan) const {
  if (ds.schema() != schema_) throw SchemaError("encoder schema mismatch");
  if (plan && plan->num_instances() != ds.num_rows()) {
    throw InvalidArgument("mask plan does not match dataset row count");
  }
  EncodedMatrix m;
  m.spans = spans_;
  m.values.setZero(static_cast<Eigen::Index>(ds.num_rows()),
                   static_cast<Eigen::Index>(width_));
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    std::span<double> out(m.values.row(static_cast<Eigen::Index>(i)).data(), width_);
    encode_row(ds.row(i),
               plan ? plan->masked(i) : std::span<const std::uint32_t>(), out);
  }
  return m;
}

Dataset OneHotEncoder::decode(const EncodedMatrix& m) const {
  if (static_cast<std::size_t>(m.values.cols()) != width_) {
    throw InvalidArgument("encoded width mismatch");
  }
  Dataset ds(schema_);
  ds.reserve(static_cast<std::size_t>(m.values.rows()));
  std::vector<Cell> row(schema_.size());
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    for (std::size_t j = 0; j < schema_.size(); ++j) {
      const ColumnSpan& s = spans_[j];
      if (s.kind == SpanKind::OneHot) {
        Eigen::Index best = -1;
        double best_v = 0.0;
        for (std::size_t k = 0; k < s.width; ++k) {
          const double v = m.values(i, static_cast<Eigen::Index>(s.offset + k));
          if (v > best_v) {
            best_v = v;
            best = static_cast<Eigen::Index>(k);
          }
        }
        row[j] = best < 0 ? Cell::missing()
                          : Cell::categorical(static_cast<std::uint32_t>(best));
      } else {
        row[j] = Cell::continuous(
            from_model_scale(j, m.values(i, static_cast<Eigen::Index>(s.offset))));
      }
    }
    ds.add_row(row);
  }
  return ds;
}

std::string OneHotEncoder::to_json() const {
  nlohmann::json doc;
  nlohmann::json attrs = nlohmann::json::array();
  for (const auto& a : schema_) {
    nlohmann::json j;
    j["name"] = a.name;
    j["kind"] = std::string(to_string(a.kind));
    if (a.is_categorical()) j["values"] = a.values;
    attrs.push_back(j);
  }
  doc["attributes"] = attrs;
  doc["standardized"] = standardized_;
  doc["means"] = means_;
  doc["scales"] = scales_;
  return doc.dump(2);
}

OneHotEncoder OneHotEncoder::from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  Schema schema;
  for (const auto& j : doc.at("attributes")) {
    Attribute a;
    a.name = j.at("name").get<std::string>();
    a.index = schema.size();
    a.kind = j.at("kind").get<std::string>() == "continuous"
                 ? AttributeKind::Continuous
                 : AttributeKind::Categorical;
    if (j.contains("values")) a.values = j["values"].get<std::vector<std::string>>();
    schema.push_back(std::move(a));
  }
  validate_schema(schema);
  OneHotEncoder enc(schema);
  enc.standardized_ = doc.at("standardized").get<bool>();
  enc.means_ = doc.at("means").get<std::vector<double>>();
  enc.scales_ = doc.at("scales").get<std::vector<double>>();
  return enc;
}

EncodedMatrix encode_one_hot(const Dataset& ds, const MaskPlan* plan) {
  return OneHotEncoder(ds.schema()).encode(ds, plan);
}

}  // namespace tagl
