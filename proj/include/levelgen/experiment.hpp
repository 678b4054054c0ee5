#pragma once

#include "levelgen/mapelites.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace levelgen {

/// Text render of the level a genome expresses under `config`.
std::string render_genome(const Genome& genome, const RunConfig& config, const SegmentDecoder& decoder);

struct RunResult {
  EncodingMode mode = EncodingMode::Cppn2Gan;
  std::uint64_t seed = 0;
  StatsRow final;
  std::vector<StatsRow> curve;
  std::vector<std::optional<double>> bin_fitness;  // per flat bin
  double beatable_fraction = 0.0;
};

/// Elites with positive fitness over filled bins (0 for an empty archive).
double beatable_fraction(const Archive& archive);

RunResult summarize(const MapElites& run);

/// Runs MAP-Elites and writes config.json, stats.csv, archive/ (snapshot),
/// heatmaps/fitness_slice_<k>.csv and renders/slice_<k>.txt for the fittest
/// elite of every slice along the last axis.
RunResult execute_run(const RunConfig& config, const std::filesystem::path& dir);

/// Mean with a 95% half-width 1.96 * sd / sqrt(n); no half-width when n < 2.
/// Values are summed in sorted order so the result ignores input order.
struct MeanCi {
  double mean = 0.0;
  std::optional<double> half_width;
};
MeanCi mean_ci(std::vector<double> values);

/// Per bin: modes with an occupant in any run, joined by '+', or "none".
std::vector<std::string> occupancy_labels(const std::vector<RunResult>& runs, const std::vector<EncodingMode>& modes,
                                          std::size_t bin_count);

/// Per bin: the mode with the highest mean elite fitness over runs that filled
/// the bin, "tie:A+B" on exact ties, or "none".
std::vector<std::string> best_labels(const std::vector<RunResult>& runs, const std::vector<EncodingMode>& modes,
                                     std::size_t bin_count);

/// One CSV matrix (axis 0 rows, axis 1 columns) per value of axis 2.
std::vector<std::string> slice_matrices(const SchemeDescriptor& d, const std::vector<std::string>& cells);

/// Writes runs.csv, summary.csv, curves_<mode>.csv and occupancy/best heatmaps under `dir`.
void write_batch_report(const std::filesystem::path& dir, std::vector<RunResult> runs,
                        const std::vector<EncodingMode>& modes, const SchemeDescriptor& descriptor);

}  // namespace levelgen
