#pragma once

#include "levelgen/layout.hpp"
#include "levelgen/rng.hpp"

#include <span>
#include <vector>

#include <json.hpp>

namespace levelgen {

/// Concatenated per-segment vectors (latent, then Zelda control values),
/// segments in row-major order. Every value lies in [-1, 1].
class DirectGenome {
public:
  DirectGenome() = default;
  DirectGenome(LevelLayout layout, std::vector<double> values);

  static DirectGenome random(const LevelLayout& layout, Rng& rng);

  const LevelLayout& layout() const noexcept { return layout_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// The full per-segment vector (latent followed by control values).
  std::span<const double> segment(int index) const;

  nlohmann::json to_json() const;
  static DirectGenome from_json(const nlohmann::json& j);

  friend bool operator==(const DirectGenome&, const DirectGenome&) = default;

private:
  LevelLayout layout_;
  std::vector<double> values_;
};

struct SegmentSlice {
  std::vector<double> latent;
  std::vector<double> aux;
};

/// Splits segment `index` into its latent part (Z values) and control part
/// (empty for Mario, 7 values for Zelda). Throws IndexOutOfRange.
SegmentSlice slice(const DirectGenome& genome, int index);

struct DirectMutationRates {
  double per_gene = 0.30;
  double distribution_index = 20.0;
};

/// Deb's bounded polynomial mutation on [lo, hi] driven by uniform draw u in [0, 1).
double polynomial_mutation(double value, double u, double eta, double lo = -1.0, double hi = 1.0);

/// Each gene independently mutated with probability `per_gene`.
/// `mutated_genes`, if given, receives the number of genes mutated.
DirectGenome mutate(const DirectGenome& genome, Rng& rng, const DirectMutationRates& rates = {},
                    std::size_t* mutated_genes = nullptr);

/// Single-point crossover: a[0..k) ++ b[k..n) with k uniform in 1..n-1.
DirectGenome crossover(const DirectGenome& a, const DirectGenome& b, Rng& rng);
/// Same with an explicit cut point.
DirectGenome crossover_at(const DirectGenome& a, const DirectGenome& b, std::size_t cut);

}  // namespace levelgen
