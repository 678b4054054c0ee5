#include "levelgen/mapelites.hpp"

#include "levelgen/errors.hpp"
#include "levelgen/tensor_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace levelgen {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v)
{
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Archive

Archive::Archive(SchemeDescriptor descriptor) : descriptor_(std::move(descriptor)), cells_(descriptor_.bin_count()) {}

bool Archive::insert(Elite elite)
{
  if (!descriptor_.valid(elite.bin)) {
    throw IndexOutOfRange("bin outside the scheme grid");
  }
  auto& cell = cells_[descriptor_.flat(elite.bin)];
  if (!cell) {
    occupied_.push_back(descriptor_.flat(elite.bin));
  } else if (!(elite.fitness > cell->fitness)) {
    return false;
  } else {
    ++replacements_;
  }
  cell = std::move(elite);
  return true;
}

double Archive::qd_score() const
{
  double sum = 0.0;
  for (const auto& c : cells_) {
    if (c) sum += c->fitness;
  }
  return sum;
}

double Archive::max_fitness() const
{
  double best = 0.0;
  for (const auto& c : cells_) {
    if (c) best = std::max(best, c->fitness);
  }
  return best;
}

std::size_t Archive::count(GenomeKind kind) const
{
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [&](const auto& c) { return c && c->genome.kind() == kind; }));
}

const Elite& Archive::sample(Rng& rng) const
{
  if (occupied_.empty()) throw EmptyBin("cannot sample from an empty archive");
  return *cells_[occupied_[rng.index(occupied_.size())]];
}

bool operator==(const Archive& a, const Archive& b)
{
  if (a.descriptor_.cardinality != b.descriptor_.cardinality || a.occupied_ != b.occupied_ ||
      a.replacements_ != b.replacements_) {
    return false;
  }
  for (std::size_t i = 0; i < a.cells_.size(); ++i) {
    const auto& x = a.cells_[i];
    const auto& y = b.cells_[i];
    if (x.has_value() != y.has_value()) return false;
    if (x && (!(x->genome == y->genome) || x->fitness != y->fitness || x->bin != y->bin || x->birth != y->birth ||
              x->stats != y->stats)) {
      return false;
    }
  }
  return true;
}

void Archive::snapshot(const fs::path& dir) const
{
  fs::create_directories(dir / "elites");
  json scheme = {{"scheme", to_string(descriptor_.scheme)},
                 {"names", descriptor_.names},
                 {"cardinality", descriptor_.cardinality},
                 {"replacements", replacements_},
                 {"occupation_order", occupied_}};
  write_text_file(dir / "scheme.json", scheme.dump(2) + "\n");

  std::string csv = "flat,b0,b1,b2,fitness,kind,provenance,birth\n";
  for (std::size_t f = 0; f < cells_.size(); ++f) {
    const auto& e = cells_[f];
    if (!e) continue;
    csv += std::to_string(f) + ',' + std::to_string(e->bin[0]) + ',' + std::to_string(e->bin[1]) + ',' +
           std::to_string(e->bin[2]) + ',' + format_double(e->fitness) + ',' + std::string(to_string(e->genome.kind())) +
           ',' + std::string(to_string(e->genome.provenance)) + ',' + std::to_string(e->birth) + '\n';
    json ej = {{"flat", f},
               {"bin", e->bin},
               {"fitness", e->fitness},
               {"birth", e->birth},
               {"stats", e->stats},
               {"genome", e->genome.to_json()}};
    write_text_file(dir / "elites" / ("bin_" + std::to_string(f) + ".json"), ej.dump() + "\n");
  }
  write_text_file(dir / "archive.csv", csv);
}

Archive Archive::load(const fs::path& dir)
{
  json scheme;
  try {
    scheme = json::parse(read_text_file(dir / "scheme.json"));
    SchemeDescriptor d;
    d.scheme = parse_scheme(scheme.at("scheme").get<std::string>());
    d.names = scheme.at("names").get<std::array<std::string, 3>>();
    d.cardinality = scheme.at("cardinality").get<std::array<int, 3>>();
    Archive a(d);
    a.replacements_ = scheme.at("replacements").get<std::uint64_t>();
    for (std::size_t f : scheme.at("occupation_order").get<std::vector<std::size_t>>()) {
      if (f >= a.cells_.size()) throw BadFormat("snapshot bin index out of range");
      const json ej = json::parse(read_text_file(dir / "elites" / ("bin_" + std::to_string(f) + ".json")));
      Elite e{Genome::from_json(ej.at("genome")), ej.at("fitness").get<double>(), ej.at("bin").get<BinIndex>(),
              ej.at("birth").get<std::int64_t>(), ej.at("stats")};
      a.cells_[f] = std::move(e);
      a.occupied_.push_back(f);
    }
    return a;
  } catch (const json::exception& e) {
    throw BadFormat(dir.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Configuration

ReproductionConfig RunConfig::reproduction() const
{
  ReproductionConfig r = reproduction_defaults(mode);
  if (conversion_probability) r.conversion_probability = *conversion_probability;
  return r;
}

namespace {

json range_json(Range r) { return json::array({r.lo, r.hi}); }

Range parse_range(const json& j, const char* key)
{
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(std::string("ranges.") + key + ": expected [lo, hi]");
  }
  Range r{j[0].get<double>(), j[1].get<double>()};
  if (!(r.lo < r.hi)) throw ConfigError(std::string("ranges.") + key + ": lo must be below hi");
  return r;
}

template <class T>
T get_key(const json& j, const char* key, const char* what)
{
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "': expected " + what);
  }
}

}  // namespace

json RunConfig::to_json() const
{
  json layout_j = layout.game == Game::Zelda ? json{{"rows", layout.rows}, {"cols", layout.cols}}
                                             : json{{"segments", layout.cols}};
  json j = {{"game", to_string(layout.game)},
            {"scheme", to_string(scheme)},
            {"mode", to_string(mode)},
            {"initial_population", initial_population},
            {"iterations", iterations},
            {"seed", seed},
            {"decoder", {{"type", decoder.type}, {"path", decoder.path}}},
            {"layout", layout_j},
            {"latent_size", layout.latent_size},
            {"conversion_probability", reproduction().conversion_probability},
            {"ranges",
             {{"decoration_sum", range_json(ranges.mario.decoration_sum)},
              {"coverage_sum", range_json(ranges.mario.coverage_sum)},
              {"leniency_sum", range_json(ranges.mario.leniency_sum)},
              {"coverage_alternation", range_json(ranges.mario.coverage_alternation)},
              {"decoration_alternation", range_json(ranges.mario.decoration_alternation)},
              {"backtrack_bins", ranges.backtrack_bins}}},
            {"batch_size", batch_size},
            {"log_interval", log_interval},
            {"workers", workers},
            {"output_dir", output_dir}};
  return j;
}

RunConfig RunConfig::from_json(const json& j)
{
  static const std::set<std::string> known = {
      "game", "scheme", "mode", "initial_population", "iterations", "seed", "decoder", "layout", "latent_size",
      "conversion_probability", "ranges", "batch_size", "log_interval", "workers", "output_dir"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  RunConfig c;
  c.scheme = parse_scheme(get_key<std::string>(j, "scheme", "a string"));
  const Game game = j.contains("game") ? parse_game(get_key<std::string>(j, "game", "a string")) : game_of(c.scheme);
  if (game != game_of(c.scheme)) {
    throw ConfigError("config key 'scheme': " + std::string(to_string(c.scheme)) + " is not a " +
                      std::string(to_string(game)) + " scheme");
  }
  if (j.contains("mode")) c.mode = parse_encoding_mode(get_key<std::string>(j, "mode", "a string"));
  if (j.contains("initial_population")) c.initial_population = get_key<int>(j, "initial_population", "an integer");
  if (j.contains("iterations")) c.iterations = get_key<std::int64_t>(j, "iterations", "an integer");
  if (j.contains("seed")) c.seed = get_key<std::uint64_t>(j, "seed", "a non-negative integer");
  if (j.contains("decoder")) {
    const auto& d = j.at("decoder");
    if (!d.is_object()) throw ConfigError("config key 'decoder': expected an object");
    c.decoder.type = d.value("type", std::string("stub"));
    c.decoder.path = d.value("path", std::string());
  }
  const int latent = j.contains("latent_size") ? get_key<int>(j, "latent_size", "an integer")
                                               : (game == Game::Zelda ? 10 : 30);
  if (game == Game::Zelda) {
    int rows = 5, cols = 5;
    if (j.contains("layout")) {
      rows = j.at("layout").value("rows", 5);
      cols = j.at("layout").value("cols", 5);
    }
    c.layout = LevelLayout::zelda(rows, cols, latent);
  } else {
    int segments = 10;
    if (j.contains("layout")) segments = j.at("layout").value("segments", 10);
    c.layout = LevelLayout::mario(segments, latent);
  }
  if (j.contains("conversion_probability") && !j.at("conversion_probability").is_null()) {
    c.conversion_probability = get_key<double>(j, "conversion_probability", "a number");
  }
  if (j.contains("ranges")) {
    const auto& r = j.at("ranges");
    if (r.contains("decoration_sum")) c.ranges.mario.decoration_sum = parse_range(r.at("decoration_sum"), "decoration_sum");
    if (r.contains("coverage_sum")) c.ranges.mario.coverage_sum = parse_range(r.at("coverage_sum"), "coverage_sum");
    if (r.contains("leniency_sum")) c.ranges.mario.leniency_sum = parse_range(r.at("leniency_sum"), "leniency_sum");
    if (r.contains("coverage_alternation")) {
      c.ranges.mario.coverage_alternation = parse_range(r.at("coverage_alternation"), "coverage_alternation");
    }
    if (r.contains("decoration_alternation")) {
      c.ranges.mario.decoration_alternation = parse_range(r.at("decoration_alternation"), "decoration_alternation");
    }
    if (r.contains("backtrack_bins")) c.ranges.backtrack_bins = r.at("backtrack_bins").get<int>();
  }
  if (j.contains("batch_size")) c.batch_size = get_key<int>(j, "batch_size", "an integer");
  if (j.contains("log_interval")) c.log_interval = get_key<int>(j, "log_interval", "an integer");
  if (j.contains("workers")) c.workers = get_key<int>(j, "workers", "an integer");
  if (j.contains("output_dir")) c.output_dir = get_key<std::string>(j, "output_dir", "a string");
  c.validate();
  return c;
}

void RunConfig::validate() const
{
  if (initial_population < 1) throw ConfigError("config key 'initial_population': must be at least 1");
  if (iterations < 0) throw ConfigError("config key 'iterations': must be non-negative");
  if (batch_size < 1) throw ConfigError("config key 'batch_size': must be at least 1");
  if (log_interval < 1) throw ConfigError("config key 'log_interval': must be at least 1");
  if (workers < 1) throw ConfigError("config key 'workers': must be at least 1");
  if (layout.rows < 1 || layout.cols < 1 || layout.latent_size < 1) {
    throw ConfigError("config key 'layout': dimensions and latent_size must be positive");
  }
  if (layout.game == Game::Zelda && layout.segment_count() > 64) {
    throw ConfigError("config key 'layout': at most 64 rooms");
  }
  if (conversion_probability && !(*conversion_probability >= 0.0 && *conversion_probability <= 1.0)) {
    throw ConfigError("config key 'conversion_probability': must lie in [0, 1]");
  }
  if (ranges.backtrack_bins < 1) throw ConfigError("config key 'ranges.backtrack_bins': must be at least 1");
  if (decoder.type == "model") {
    if (decoder.path.empty()) throw ConfigError("config key 'decoder.path': required when decoder.type is 'model'");
    if (!fs::exists(decoder.path)) throw ConfigError("config key 'decoder.path': no such file '" + decoder.path + "'");
  } else if (decoder.type != "stub") {
    throw ConfigError("config key 'decoder.type': expected 'stub' or 'model'");
  }
}

std::unique_ptr<SegmentDecoder> make_decoder(const RunConfig& config)
{
  if (config.decoder.type == "model") {
    auto model = GeneratorModel::load(config.decoder.path);
    const auto crop = model.crop_shape();
    const bool zelda = config.layout.game == Game::Zelda;
    if (crop[1] != (zelda ? kZeldaRoomHeight : kMarioSegmentHeight) ||
        crop[2] != (zelda ? kZeldaRoomWidth : kMarioSegmentWidth)) {
      throw ConfigError("decoder crop does not match the game's segment size");
    }
    return std::make_unique<ModelDecoder>(std::move(model));
  }
  return std::make_unique<StubDecoder>(config.layout.game, config.layout.latent_size);
}

// ---------------------------------------------------------------------------
// Stats

std::string stats_csv_header()
{
  return "iteration,evaluations,filled_bins,qd_score,max_fitness,cppn_elites,direct_elites,failures";
}

std::string to_csv(const StatsRow& r)
{
  return std::to_string(r.iteration) + ',' + std::to_string(r.evaluations) + ',' + std::to_string(r.filled) + ',' +
         format_double(r.qd_score) + ',' + format_double(r.max_fitness) + ',' + std::to_string(r.cppn) + ',' +
         std::to_string(r.direct) + ',' + std::to_string(r.failures);
}

// ---------------------------------------------------------------------------
// Main loop

namespace {

enum StreamPurpose : std::uint64_t { kInitialStream = 1, kOffspringStream = 2 };

}  // namespace

MapElites::MapElites(RunConfig config, const SegmentDecoder& decoder)
    : config_(std::move(config)),
      reproduction_(config_.reproduction()),
      evaluator_(config_.scheme, config_.layout, decoder, config_.ranges),
      archive_(evaluator_.descriptor())
{
  config_.validate();
}

StatsRow MapElites::current_stats() const
{
  return {iteration_,
          evaluations_,
          archive_.filled(),
          archive_.qd_score(),
          archive_.max_fitness(),
          archive_.count(GenomeKind::Cppn),
          archive_.count(GenomeKind::Direct),
          failures_};
}

void MapElites::evaluate_all(const std::vector<Genome>& genomes, std::vector<Evaluation>& out) const
{
  out.assign(genomes.size(), Evaluation{});
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config_.workers), genomes.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < genomes.size(); ++i) out[i] = evaluator_.evaluate(genomes[i]);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < genomes.size(); i += workers) out[i] = evaluator_.evaluate(genomes[i]);
    });
  }
  for (auto& t : pool) t.join();
}

void MapElites::record(const Genome& genome, const Evaluation& e, std::int64_t birth)
{
  ++evaluations_;
  if (e.failed) {
    ++failures_;
    return;
  }
  archive_.insert({genome, e.fitness, e.bin, birth, e.stats});
}

void MapElites::initialize()
{
  std::vector<Genome> genomes;
  for (int i = 0; i < config_.initial_population; ++i) {
    Rng rng = Rng::stream(config_.seed, kInitialStream, static_cast<std::uint64_t>(i));
    genomes.push_back(random_genome(config_.mode, config_.layout, rng));
  }
  std::vector<Evaluation> results;
  evaluate_all(genomes, results);
  for (std::size_t i = 0; i < genomes.size(); ++i) {
    record(genomes[i], results[i], -static_cast<std::int64_t>(genomes.size() - i));
  }
  initialized_ = true;
  log_.push_back(current_stats());
}

void MapElites::step()
{
  if (!initialized_) initialize();
  const auto count = std::min<std::int64_t>(config_.batch_size, remaining());
  if (count <= 0) return;
  if (archive_.filled() == 0) {
    throw EmptyBin("every initial individual failed to evaluate; nothing to reproduce");
  }
  std::vector<Genome> offspring;
  offspring.reserve(static_cast<std::size_t>(count));
  const ParentSampler sampler = [this](Rng& rng) -> const Genome& { return archive_.sample(rng).genome; };
  for (std::int64_t k = 0; k < count; ++k) {
    Rng rng = Rng::stream(config_.seed, kOffspringStream, static_cast<std::uint64_t>(iteration_ + k));
    const Genome& parent = archive_.sample(rng).genome;
    offspring.push_back(reproduce(parent, sampler, config_.layout, rng, reproduction_));
  }
  std::vector<Evaluation> results;
  evaluate_all(offspring, results);
  const std::int64_t before = iteration_;
  for (std::size_t i = 0; i < offspring.size(); ++i) {
    record(offspring[i], results[i], iteration_);
    ++iteration_;
  }
  if (iteration_ / config_.log_interval != before / config_.log_interval || remaining() == 0) {
    log_.push_back(current_stats());
  }
}

void MapElites::run(const std::function<void(const MapElites&)>& on_log)
{
  if (!initialized_) {
    initialize();
    if (on_log) on_log(*this);
  }
  while (remaining() > 0) {
    const auto logged = log_.size();
    step();
    if (on_log && log_.size() != logged) on_log(*this);
  }
}

}  // namespace levelgen
