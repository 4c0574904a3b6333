#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tagl/chordal/structure.hpp"
#include "tagl/selfsup/config.hpp"

namespace tagl::bench {

inline constexpr int kConfigSchemaVersion = 1;

// Model names understood by the harness, in canonical order. The canonical
// position keys each model's seed stream.
inline const std::vector<std::string>& known_models() {
  static const std::vector<std::string> m{"most_freq", "median", "chordal", "made", "dae"};
  return m;
}
std::size_t model_index(const std::string& name);  // throws InvalidArgument

enum class DatasetKind { Categorical, Continuous };
std::string to_string(DatasetKind kind);

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  std::optional<std::filesystem::path> schema;  // CSV schema sidecar
  DatasetKind kind = DatasetKind::Categorical;
};

struct ChordalSettings {
  ScoreConfig score;
  double m = 1.0;  // smoothing pseudo-count
};

// Everything a model needs to be trained outside the benchmark loop.
struct ModelSettings {
  std::size_t bins = 5;
  std::size_t samples = 10;
  ChordalSettings chordal;
  TrainConfig made;
  TrainConfig dae;
  // 0 trains the given config; otherwise the best of this many seeded draws
  // from the model's search grid (validation loss) is kept.
  std::size_t search_draws = 0;
};

struct BenchConfig {
  int schema_version = kConfigSchemaVersion;
  std::vector<DatasetSpec> datasets;
  std::vector<std::string> models;
  std::uint64_t seed = 0;
  double split_ratio = 0.8;
  double train_mask_rate = 0.2;
  std::vector<double> test_rates{0.1, 0.2, 0.4, 0.6, 0.8};
  std::size_t chunks = 1;
  ModelSettings settings;
  std::filesystem::path output = "bench_out";

  // Throws InvalidArgument on out-of-range values or unknown models.
  void validate() const;
  std::string to_json() const;
  // Unknown keys, a missing or different schema_version, or a malformed
  // document raise SchemaError. Relative dataset paths resolve against
  // `base_dir`.
  static BenchConfig from_json(const std::string& text, const std::filesystem::path& base_dir = {});
  static BenchConfig load(const std::filesystem::path& path);
};

}  // namespace tagl::bench
