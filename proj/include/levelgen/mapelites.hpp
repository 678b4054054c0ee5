#pragma once

#include "levelgen/decoder.hpp"
#include "levelgen/evaluator.hpp"
#include "levelgen/genome.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace levelgen {

struct Elite {
  Genome genome;
  double fitness = 0.0;
  BinIndex bin{};
  std::int64_t birth = 0;  // iteration that produced it; initial individuals are negative
  nlohmann::json stats;
};

/// One elite per bin, replaced only by strictly fitter offspring.
class Archive {
public:
  explicit Archive(SchemeDescriptor descriptor);

  /// Inserts `elite` if its bin is empty or it is strictly fitter. Returns true on insertion.
  bool insert(Elite elite);

  const SchemeDescriptor& descriptor() const noexcept { return descriptor_; }
  const std::optional<Elite>& at(std::size_t flat) const { return cells_.at(flat); }
  const std::optional<Elite>& at(const BinIndex& bin) const { return at(descriptor_.flat(bin)); }

  /// Occupied flat indices in order of first occupation.
  const std::vector<std::size_t>& occupied() const noexcept { return occupied_; }
  std::size_t filled() const noexcept { return occupied_.size(); }

  /// Sum of elite fitness, added in flat-index order.
  double qd_score() const;
  double max_fitness() const;
  std::size_t count(GenomeKind kind) const;

  /// Uniformly chosen occupied bin. Throws EmptyBin when the archive is empty.
  const Elite& sample(Rng& rng) const;

  std::uint64_t replacements() const noexcept { return replacements_; }

  /// archive.csv, scheme.json and elites/bin_<flat>.json under `dir`.
  void snapshot(const std::filesystem::path& dir) const;
  static Archive load(const std::filesystem::path& dir);

  friend bool operator==(const Archive& a, const Archive& b);

private:
  SchemeDescriptor descriptor_;
  std::vector<std::optional<Elite>> cells_;
  std::vector<std::size_t> occupied_;
  std::uint64_t replacements_ = 0;
};

struct DecoderSpec {
  std::string type = "stub";  // stub | model
  std::string path;
};

struct RunConfig {
  Scheme scheme = Scheme::Wwr;
  EncodingMode mode = EncodingMode::Cppn2Gan;
  LevelLayout layout = LevelLayout::zelda(5, 5);
  int initial_population = 100;
  std::int64_t iterations = 9'900;  // offspring after initialisation
  std::uint64_t seed = 0;
  DecoderSpec decoder;
  std::optional<double> conversion_probability;  // unset: mode default
  SchemeRanges ranges;
  int batch_size = 1;
  int log_interval = 100;
  int workers = 1;
  std::string output_dir;

  ReproductionConfig reproduction() const;
  nlohmann::json to_json() const;
  /// Throws ConfigError naming the offending key.
  static RunConfig from_json(const nlohmann::json& j);
  void validate() const;
};

std::unique_ptr<SegmentDecoder> make_decoder(const RunConfig& config);

struct StatsRow {
  std::int64_t iteration = 0;
  std::uint64_t evaluations = 0;
  std::size_t filled = 0;
  double qd_score = 0.0;
  double max_fitness = 0.0;
  std::size_t cppn = 0;
  std::size_t direct = 0;
  std::uint64_t failures = 0;
};

std::string stats_csv_header();
std::string to_csv(const StatsRow& row);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// MAP-Elites main loop.
///
/// Each offspring's random stream is derived from (seed, iteration), parents
/// are drawn from the archive as it stood at the start of the batch, and
/// batch results are inserted in iteration order, so the run is the same for
/// any worker count.
class MapElites {
public:
  MapElites(RunConfig config, const SegmentDecoder& decoder);

  void initialize();
  /// Produces, evaluates and inserts the next batch (at most `remaining()` offspring).
  void step();
  /// initialize() if needed, then steps until the budget is spent.
  void run(const std::function<void(const MapElites&)>& on_log = {});

  std::int64_t iteration() const noexcept { return iteration_; }
  std::int64_t remaining() const noexcept { return config_.iterations - iteration_; }
  std::uint64_t evaluations() const noexcept { return evaluations_; }
  std::uint64_t failures() const noexcept { return failures_; }
  const Archive& archive() const noexcept { return archive_; }
  const RunConfig& config() const noexcept { return config_; }
  const Evaluator& evaluator() const noexcept { return evaluator_; }
  const std::vector<StatsRow>& log() const noexcept { return log_; }
  StatsRow current_stats() const;

private:
  void evaluate_all(const std::vector<Genome>& genomes, std::vector<Evaluation>& out) const;
  void record(const Genome& genome, const Evaluation& e, std::int64_t birth);

  RunConfig config_;
  ReproductionConfig reproduction_;
  Evaluator evaluator_;
  Archive archive_;
  bool initialized_ = false;
  std::int64_t iteration_ = 0;
  std::uint64_t evaluations_ = 0;
  std::uint64_t failures_ = 0;
  std::vector<StatsRow> log_;
};

}  // namespace levelgen
