#include "levelgen/direct.hpp"

#include "levelgen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace levelgen {

DirectGenome::DirectGenome(LevelLayout layout, std::vector<double> values)
    : layout_(layout), values_(std::move(values))
{
  if (values_.size() != layout_.genome_length()) {
    throw LayoutMismatch("direct genome has " + std::to_string(values_.size()) + " values, layout needs " +
                         std::to_string(layout_.genome_length()));
  }
  for (double v : values_) {
    if (!(v >= -1.0 && v <= 1.0)) {
      throw InvalidGenome("direct genome value outside [-1, 1]");
    }
  }
}

DirectGenome DirectGenome::random(const LevelLayout& layout, Rng& rng)
{
  std::vector<double> values(layout.genome_length());
  for (auto& v : values) v = rng.uniform(-1.0, 1.0);
  return DirectGenome(layout, std::move(values));
}

std::span<const double> DirectGenome::segment(int index) const
{
  if (index < 0 || index >= layout_.segment_count()) {
    throw IndexOutOfRange("segment index " + std::to_string(index) + " outside layout of " +
                          std::to_string(layout_.segment_count()));
  }
  const auto width = static_cast<std::size_t>(layout_.segment_width());
  return std::span<const double>(values_).subspan(static_cast<std::size_t>(index) * width, width);
}

nlohmann::json DirectGenome::to_json() const
{
  return {{"layout", layout_.to_json()}, {"values", values_}};
}

DirectGenome DirectGenome::from_json(const nlohmann::json& j)
{
  return DirectGenome(LevelLayout::from_json(j.at("layout")), j.at("values").get<std::vector<double>>());
}

SegmentSlice slice(const DirectGenome& genome, int index)
{
  const auto seg = genome.segment(index);
  const auto z = static_cast<std::size_t>(genome.layout().latent_size);
  return {std::vector<double>(seg.begin(), seg.begin() + static_cast<std::ptrdiff_t>(z)),
          std::vector<double>(seg.begin() + static_cast<std::ptrdiff_t>(z), seg.end())};
}

double polynomial_mutation(double value, double u, double eta, double lo, double hi)
{
  const double span = hi - lo;
  const double d1 = (value - lo) / span;
  const double d2 = (hi - value) / span;
  const double power = 1.0 / (eta + 1.0);
  double dq = 0.0;
  if (u < 0.5) {
    const double base = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
    dq = std::pow(base, power) - 1.0;
  } else {
    const double base = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
    dq = 1.0 - std::pow(base, power);
  }
  return std::clamp(value + dq * span, lo, hi);
}

DirectGenome mutate(const DirectGenome& genome, Rng& rng, const DirectMutationRates& rates,
                    std::size_t* mutated_genes)
{
  std::vector<double> values = genome.values();
  std::size_t count = 0;
  for (auto& v : values) {
    if (rng.chance(rates.per_gene)) {
      v = polynomial_mutation(v, rng.uniform(), rates.distribution_index);
      ++count;
    }
  }
  if (mutated_genes) *mutated_genes = count;
  return DirectGenome(genome.layout(), std::move(values));
}

DirectGenome crossover_at(const DirectGenome& a, const DirectGenome& b, std::size_t cut)
{
  if (!(a.layout() == b.layout())) {
    throw LayoutMismatch("crossover parents have different layouts");
  }
  if (cut > a.values().size()) {
    throw IndexOutOfRange("crossover cut beyond genome length");
  }
  std::vector<double> child(a.values().begin(), a.values().begin() + static_cast<std::ptrdiff_t>(cut));
  child.insert(child.end(), b.values().begin() + static_cast<std::ptrdiff_t>(cut), b.values().end());
  return DirectGenome(a.layout(), std::move(child));
}

DirectGenome crossover(const DirectGenome& a, const DirectGenome& b, Rng& rng)
{
  if (!(a.layout() == b.layout())) {
    throw LayoutMismatch("crossover parents have different layouts");
  }
  const std::size_t n = a.values().size();
  if (n < 2) return a;
  return crossover_at(a, b, 1 + rng.index(n - 1));
}

}  // namespace levelgen
