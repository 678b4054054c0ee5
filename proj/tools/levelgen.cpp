// levelgen: run, batch, render and summarise MAP-Elites level generation experiments.
//
//   levelgen run    --config cfg.json [--seed N] [--iterations N] [--mode M] [--output-dir D]
//   levelgen batch  --config cfg.json --modes cppn2gan,direct2gan --runs 30 --output-dir D
//   levelgen render --run D (--bin FLAT | --coords a,b,c) [--out file]
//   levelgen stats  --run D
//   levelgen corpus --game zelda --output-dir D file...
//
// Exit codes: 0 success, 1 runtime error, 2 config error, 3 partial batch failure.
// LEVELGEN_WORKERS caps the number of concurrent batch runs.

#include "levelgen/corpus.hpp"
#include "levelgen/errors.hpp"
#include "levelgen/experiment.hpp"
#include "levelgen/tensor_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace levelgen;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> iterations;
  std::optional<std::string> mode;
  std::optional<std::string> scheme;
  std::optional<std::string> output_dir;
  std::optional<int> workers;
};

void add_overrides(CLI::App* cmd, Overrides& o)
{
  cmd->add_option("--config", o.config_path, "JSON run configuration")->required();
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--iterations", o.iterations, "offspring after initialisation");
  cmd->add_option("--mode", o.mode, "cppn2gan | direct2gan | cppn_then_direct2gan");
  cmd->add_option("--scheme", o.scheme, "wwr | distinct_btr | sum_dsl | distinct_asad");
  cmd->add_option("--output-dir", o.output_dir, "run directory");
  cmd->add_option("--workers", o.workers, "evaluation threads per run");
}

RunConfig load_config(const Overrides& o)
{
  json j;
  try {
    j = json::parse(read_text_file(o.config_path));
  } catch (const json::parse_error& e) {
    throw ConfigError(o.config_path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  if (!j.is_object()) throw ConfigError(o.config_path + ": expected a JSON object");
  if (o.seed) j["seed"] = *o.seed;
  if (o.iterations) j["iterations"] = *o.iterations;
  if (o.mode) j["mode"] = *o.mode;
  if (o.scheme) {
    j["scheme"] = *o.scheme;
    j.erase("game");
  }
  if (o.output_dir) j["output_dir"] = *o.output_dir;
  if (o.workers) j["workers"] = *o.workers;
  return RunConfig::from_json(j);
}

std::vector<std::string> split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, sep);) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

int worker_cap()
{
  if (const char* env = std::getenv("LEVELGEN_WORKERS")) {
    const int n = std::atoi(env);
    if (n < 1) throw ConfigError("LEVELGEN_WORKERS must be a positive integer");
    return n;
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

int cmd_run(const Overrides& o)
{
  RunConfig cfg = load_config(o);
  if (cfg.output_dir.empty()) throw ConfigError("config key 'output_dir': required for run");
  const auto result = execute_run(cfg, cfg.output_dir);
  std::cout << "filled_bins=" << result.final.filled << " qd_score=" << format_double(result.final.qd_score)
            << " evaluations=" << result.final.evaluations << "\n";
  return 0;
}

int cmd_batch(const Overrides& o, const std::string& modes_arg, int runs, const std::string& seeds_arg)
{
  RunConfig base = load_config(o);
  if (base.output_dir.empty()) throw ConfigError("config key 'output_dir': required for batch");
  std::vector<EncodingMode> modes;
  for (const auto& m : split(modes_arg.empty() ? std::string(to_string(base.mode)) : modes_arg, ',')) {
    modes.push_back(parse_encoding_mode(m));
  }
  std::vector<std::uint64_t> seeds;
  if (!seeds_arg.empty()) {
    for (const auto& s : split(seeds_arg, ',')) {
      try {
        seeds.push_back(std::stoull(s));
      } catch (const std::exception&) {
        throw ConfigError("--seeds: '" + s + "' is not a seed");
      }
    }
  } else {
    if (runs < 1) throw ConfigError("--runs must be at least 1");
    for (int i = 0; i < runs; ++i) seeds.push_back(base.seed + static_cast<std::uint64_t>(i));
  }

  struct Job {
    RunConfig cfg;
    fs::path dir;
  };
  std::vector<Job> jobs;
  for (auto m : modes) {
    for (auto s : seeds) {
      RunConfig c = base;
      c.mode = m;
      c.seed = s;
      c.output_dir = (fs::path(base.output_dir) / std::string(to_string(m)) / ("seed_" + std::to_string(s))).string();
      jobs.push_back({c, c.output_dir});
    }
  }

  std::vector<std::optional<RunResult>> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = execute_run(jobs[i].cfg, jobs[i].dir);
        std::lock_guard lock(io);
        std::cout << to_string(jobs[i].cfg.mode) << " seed " << jobs[i].cfg.seed << ": filled "
                  << results[i]->final.filled << ", qd " << format_double(results[i]->final.qd_score) << "\n";
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(worker_cap()), jobs.size());
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<RunResult> ok;
  std::string failures;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (results[i]) {
      ok.push_back(*results[i]);
    } else {
      failures += std::string(to_string(jobs[i].cfg.mode)) + ',' + std::to_string(jobs[i].cfg.seed) + ',' + errors[i] + '\n';
    }
  }
  const auto descriptor = describe(base.scheme, base.layout, base.ranges);
  write_batch_report(base.output_dir, ok, modes, descriptor);
  if (!failures.empty()) {
    write_text_file(fs::path(base.output_dir) / "failures.csv", "mode,seed,error\n" + failures);
    std::cerr << "some runs failed; see " << (fs::path(base.output_dir) / "failures.csv").string() << "\n";
    return kExitPartial;
  }
  return 0;
}

RunConfig load_run_config(const fs::path& run_dir)
{
  try {
    return RunConfig::from_json(json::parse(read_text_file(run_dir / "config.json")));
  } catch (const json::parse_error& e) {
    throw ConfigError((run_dir / "config.json").string() + ": " + e.what());
  }
}

int cmd_render(const std::string& run_dir, std::optional<std::size_t> flat, const std::string& coords,
               const std::string& out)
{
  const RunConfig cfg = load_run_config(run_dir);
  const Archive archive = Archive::load(fs::path(run_dir) / "archive");
  std::size_t f = 0;
  if (flat) {
    f = *flat;
  } else {
    const auto parts = split(coords, ',');
    if (parts.size() != 3) throw ConfigError("--coords expects three comma-separated integers");
    const BinIndex bin{std::stoi(parts[0]), std::stoi(parts[1]), std::stoi(parts[2])};
    if (!archive.descriptor().valid(bin)) throw ConfigError("--coords outside the scheme grid");
    f = archive.descriptor().flat(bin);
  }
  if (f >= archive.descriptor().bin_count() || !archive.at(f)) {
    throw EmptyBin("bin " + std::to_string(f) + " has no elite");
  }
  const auto decoder = make_decoder(cfg);
  const std::string text = render_genome(archive.at(f)->genome, cfg, *decoder);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
  return 0;
}

int cmd_stats(const std::string& run_dir)
{
  const Archive archive = Archive::load(fs::path(run_dir) / "archive");
  const json j = {{"filled_bins", archive.filled()},
                  {"bin_count", archive.descriptor().bin_count()},
                  {"qd_score", archive.qd_score()},
                  {"max_fitness", archive.max_fitness()},
                  {"beatable_fraction", beatable_fraction(archive)},
                  {"cppn_elites", archive.count(GenomeKind::Cppn)},
                  {"direct_elites", archive.count(GenomeKind::Direct)},
                  {"replacements", archive.replacements()}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_corpus(const std::string& game_name, const std::vector<std::string>& files, const std::string& out_dir)
{
  const Game game = parse_game(game_name);
  const auto& vocab = TileVocabulary::for_game(game);
  std::vector<TrainingSample> samples;
  if (game == Game::Mario) {
    for (const auto& f : files) {
      auto windows = mario_windows(parse_level_file(f, vocab));
      samples.insert(samples.end(), windows.begin(), windows.end());
    }
  } else {
    std::vector<std::vector<std::string>> dungeons;
    for (const auto& f : files) dungeons.push_back(read_level_lines(f));
    samples = zelda_unique_rooms(dungeons, vocab);
  }
  const fs::path dir(out_dir);
  export_one_hot(samples, vocab.channel_count(), dir / "corpus.json");
  write_corpus_manifest(dir / "manifest.json", game, samples.size(), files, "corpus.json");
  std::cout << samples.size() << " samples\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Quality-diversity level generation with CPPN and direct latent encodings"};
  app.require_subcommand(1);

  Overrides run_o, batch_o;
  auto* run = app.add_subcommand("run", "one MAP-Elites run");
  add_overrides(run, run_o);

  auto* batch = app.add_subcommand("batch", "several runs per mode with aggregated statistics");
  add_overrides(batch, batch_o);
  std::string modes, seeds;
  int runs = 1;
  batch->add_option("--modes", modes, "comma-separated encoding modes (default: config mode)");
  batch->add_option("--runs", runs, "runs per mode, seeds counting up from the config seed");
  batch->add_option("--seeds", seeds, "explicit comma-separated seeds");

  auto* render = app.add_subcommand("render", "text render of an archived elite");
  std::string render_dir, coords, render_out;
  std::optional<std::size_t> flat;
  render->add_option("--run", render_dir, "run directory")->required();
  auto* bin_opt = render->add_option("--bin", flat, "flat bin index");
  auto* coord_opt = render->add_option("--coords", coords, "bin coordinates a,b,c");
  bin_opt->excludes(coord_opt);
  render->add_option("--out", render_out, "output file (default stdout)");

  auto* stats = app.add_subcommand("stats", "archive summary as JSON");
  std::string stats_dir;
  stats->add_option("--run", stats_dir, "run directory")->required();

  auto* corpus = app.add_subcommand("corpus", "export a one-hot training corpus");
  std::string game, corpus_out;
  std::vector<std::string> files;
  corpus->add_option("--game", game, "mario | zelda")->required();
  corpus->add_option("--output-dir", corpus_out, "output directory")->required();
  corpus->add_option("files", files, "level files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_o);
    if (*batch) return cmd_batch(batch_o, modes, runs, seeds);
    if (*render) {
      if (!flat && coords.empty()) throw ConfigError("render needs --bin or --coords");
      return cmd_render(render_dir, flat, coords, render_out);
    }
    if (*stats) return cmd_stats(stats_dir);
    if (*corpus) return cmd_corpus(game, files, corpus_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
