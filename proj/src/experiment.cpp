#include "levelgen/experiment.hpp"

#include "levelgen/assembly.hpp"
#include "levelgen/errors.hpp"
#include "levelgen/tensor_io.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace levelgen {

namespace fs = std::filesystem;

std::string render_genome(const Genome& genome, const RunConfig& config, const SegmentDecoder& decoder)
{
  if (config.layout.game == Game::Zelda) {
    return render_zelda(assemble_zelda(genome, decoder, config.layout));
  }
  return render_mario(assemble_mario(genome, decoder, config.layout));
}

double beatable_fraction(const Archive& archive)
{
  if (archive.filled() == 0) return 0.0;
  std::size_t beatable = 0;
  for (std::size_t f : archive.occupied()) beatable += archive.at(f)->fitness > 0.0;
  return static_cast<double>(beatable) / static_cast<double>(archive.filled());
}

RunResult summarize(const MapElites& run)
{
  RunResult r;
  r.mode = run.config().mode;
  r.seed = run.config().seed;
  r.final = run.current_stats();
  r.curve = run.log();
  r.bin_fitness.resize(run.archive().descriptor().bin_count());
  for (std::size_t f : run.archive().occupied()) r.bin_fitness[f] = run.archive().at(f)->fitness;
  r.beatable_fraction = beatable_fraction(run.archive());
  return r;
}

RunResult execute_run(const RunConfig& config, const fs::path& dir)
{
  const auto decoder = make_decoder(config);
  MapElites me(config, *decoder);
  fs::create_directories(dir);
  write_text_file(dir / "config.json", config.to_json().dump(2) + "\n");
  me.run();

  std::string csv = stats_csv_header() + "\n";
  for (const auto& row : me.log()) csv += to_csv(row) + "\n";
  write_text_file(dir / "stats.csv", csv);
  me.archive().snapshot(dir / "archive");

  const auto& d = me.archive().descriptor();
  std::vector<std::string> cells(d.bin_count());
  for (std::size_t f = 0; f < cells.size(); ++f) {
    const auto& e = me.archive().at(f);
    cells[f] = e ? format_double(e->fitness) : "";
  }
  const auto slices = slice_matrices(d, cells);
  for (std::size_t k = 0; k < slices.size(); ++k) {
    write_text_file(dir / "heatmaps" / ("fitness_slice_" + std::to_string(k) + ".csv"), slices[k]);
    const Elite* best = nullptr;
    for (std::size_t f : me.archive().occupied()) {
      const auto& e = *me.archive().at(f);
      if (static_cast<std::size_t>(e.bin[2]) != k) continue;
      if (!best || e.fitness > best->fitness || (e.fitness == best->fitness && f < d.flat(best->bin))) best = &e;
    }
    if (best) {
      write_text_file(dir / "renders" / ("slice_" + std::to_string(k) + ".txt"),
                      render_genome(best->genome, config, *decoder));
    }
  }
  return summarize(me);
}

MeanCi mean_ci(std::vector<double> values)
{
  MeanCi out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / n;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.half_width = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

namespace {

std::string join_modes(const std::vector<EncodingMode>& modes)
{
  std::string s;
  for (auto m : modes) s += (s.empty() ? "" : "+") + std::string(to_string(m));
  return s;
}

}  // namespace

std::vector<std::string> occupancy_labels(const std::vector<RunResult>& runs, const std::vector<EncodingMode>& modes,
                                          std::size_t bin_count)
{
  std::vector<std::string> labels(bin_count);
  for (std::size_t f = 0; f < bin_count; ++f) {
    std::vector<EncodingMode> present;
    for (auto m : modes) {
      const bool any = std::any_of(runs.begin(), runs.end(),
                                   [&](const RunResult& r) { return r.mode == m && r.bin_fitness.at(f).has_value(); });
      if (any) present.push_back(m);
    }
    labels[f] = present.empty() ? "none" : join_modes(present);
  }
  return labels;
}

std::vector<std::string> best_labels(const std::vector<RunResult>& runs, const std::vector<EncodingMode>& modes,
                                     std::size_t bin_count)
{
  std::vector<std::string> labels(bin_count);
  for (std::size_t f = 0; f < bin_count; ++f) {
    std::vector<std::pair<EncodingMode, double>> means;
    for (auto m : modes) {
      std::vector<double> values;
      for (const auto& r : runs) {
        if (r.mode == m && r.bin_fitness.at(f)) values.push_back(*r.bin_fitness[f]);
      }
      if (!values.empty()) means.emplace_back(m, mean_ci(values).mean);
    }
    if (means.empty()) {
      labels[f] = "none";
      continue;
    }
    double best = means.front().second;
    for (const auto& [m, v] : means) best = std::max(best, v);
    std::vector<EncodingMode> winners;
    for (const auto& [m, v] : means) {
      if (v == best) winners.push_back(m);
    }
    labels[f] = winners.size() == 1 ? join_modes(winners) : "tie:" + join_modes(winners);
  }
  return labels;
}

std::vector<std::string> slice_matrices(const SchemeDescriptor& d, const std::vector<std::string>& cells)
{
  std::vector<std::string> out;
  for (int k = 0; k < d.cardinality[2]; ++k) {
    std::string csv;
    for (int a = 0; a < d.cardinality[0]; ++a) {
      for (int b = 0; b < d.cardinality[1]; ++b) {
        if (b) csv += ',';
        csv += cells.at(d.flat({a, b, k}));
      }
      csv += '\n';
    }
    out.push_back(std::move(csv));
  }
  return out;
}

namespace {

std::string ci_cells(const MeanCi& m)
{
  return format_double(m.mean) + ',' + (m.half_width ? format_double(*m.half_width) : std::string("NA"));
}

}  // namespace

void write_batch_report(const fs::path& dir, std::vector<RunResult> runs, const std::vector<EncodingMode>& modes,
                        const SchemeDescriptor& descriptor)
{
  std::sort(runs.begin(), runs.end(), [](const RunResult& a, const RunResult& b) {
    return std::pair(static_cast<int>(a.mode), a.seed) < std::pair(static_cast<int>(b.mode), b.seed);
  });
  fs::create_directories(dir);

  std::string runs_csv = "mode,seed,qd_score,filled_bins,beatable_fraction,max_fitness,cppn_elites,direct_elites\n";
  for (const auto& r : runs) {
    runs_csv += std::string(to_string(r.mode)) + ',' + std::to_string(r.seed) + ',' + format_double(r.final.qd_score) +
                ',' + std::to_string(r.final.filled) + ',' + format_double(r.beatable_fraction) + ',' +
                format_double(r.final.max_fitness) + ',' + std::to_string(r.final.cppn) + ',' +
                std::to_string(r.final.direct) + '\n';
  }
  write_text_file(dir / "runs.csv", runs_csv);

  std::string summary =
      "mode,runs,qd_mean,qd_ci95,filled_mean,filled_ci95,beatable_mean,beatable_ci95,cppn_mean,cppn_ci95,"
      "direct_mean,direct_ci95\n";
  for (auto m : modes) {
    std::vector<double> qd, filled, beatable, cppn, direct;
    std::vector<const RunResult*> mine;
    for (const auto& r : runs) {
      if (r.mode != m) continue;
      mine.push_back(&r);
      qd.push_back(r.final.qd_score);
      filled.push_back(static_cast<double>(r.final.filled));
      beatable.push_back(r.beatable_fraction);
      cppn.push_back(static_cast<double>(r.final.cppn));
      direct.push_back(static_cast<double>(r.final.direct));
    }
    if (mine.empty()) continue;
    summary += std::string(to_string(m)) + ',' + std::to_string(mine.size()) + ',' + ci_cells(mean_ci(qd)) + ',' +
               ci_cells(mean_ci(filled)) + ',' + ci_cells(mean_ci(beatable)) + ',' + ci_cells(mean_ci(cppn)) + ',' +
               ci_cells(mean_ci(direct)) + '\n';

    std::size_t points = mine.front()->curve.size();
    for (const auto* r : mine) points = std::min(points, r->curve.size());
    std::string curve = "iteration,evaluations,qd_mean,qd_ci95,filled_mean,filled_ci95\n";
    for (std::size_t i = 0; i < points; ++i) {
      std::vector<double> q, f;
      for (const auto* r : mine) {
        q.push_back(r->curve[i].qd_score);
        f.push_back(static_cast<double>(r->curve[i].filled));
      }
      curve += std::to_string(mine.front()->curve[i].iteration) + ',' +
               std::to_string(mine.front()->curve[i].evaluations) + ',' + ci_cells(mean_ci(q)) + ',' +
               ci_cells(mean_ci(f)) + '\n';
    }
    write_text_file(dir / ("curves_" + std::string(to_string(m)) + ".csv"), curve);
  }
  write_text_file(dir / "summary.csv", summary);

  const auto occupancy = slice_matrices(descriptor, occupancy_labels(runs, modes, descriptor.bin_count()));
  const auto best = slice_matrices(descriptor, best_labels(runs, modes, descriptor.bin_count()));
  for (std::size_t k = 0; k < occupancy.size(); ++k) {
    write_text_file(dir / "heatmaps" / ("occupancy_slice_" + std::to_string(k) + ".csv"), occupancy[k]);
    write_text_file(dir / "heatmaps" / ("best_slice_" + std::to_string(k) + ".csv"), best[k]);
  }
}

}  // namespace levelgen
