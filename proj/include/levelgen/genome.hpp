#pragma once

#include "levelgen/cppn.hpp"
#include "levelgen/direct.hpp"
#include "levelgen/layout.hpp"
#include "levelgen/rng.hpp"

#include <functional>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace levelgen {

enum class GenomeKind { Cppn, Direct };
enum class Provenance { Initial, Mutated, Crossed, Converted };

std::string_view to_string(GenomeKind kind);
std::string_view to_string(Provenance provenance);

/// Either encoding, plus how the individual came about.
struct Genome {
  std::variant<CppnGenome, DirectGenome> body;
  Provenance provenance = Provenance::Initial;

  GenomeKind kind() const noexcept
  {
    return std::holds_alternative<CppnGenome>(body) ? GenomeKind::Cppn : GenomeKind::Direct;
  }
  bool is_cppn() const noexcept { return kind() == GenomeKind::Cppn; }
  const CppnGenome& cppn() const { return std::get<CppnGenome>(body); }
  const DirectGenome& direct() const { return std::get<DirectGenome>(body); }

  nlohmann::json to_json() const;
  static Genome from_json(const nlohmann::json& j);

  friend bool operator==(const Genome&, const Genome&) = default;
};

enum class EncodingMode { Cppn2Gan, Direct2Gan, CppnThenDirect2Gan };

std::string_view to_string(EncodingMode mode);
EncodingMode parse_encoding_mode(std::string_view text);

/// Per-segment vectors (latent then control values) in row-major segment order.
/// CPPNs are queried at segment_inputs(); direct genomes are sliced.
std::vector<std::vector<double>> express(const Genome& genome, const LevelLayout& layout);

/// Direct genome holding the CPPN's outputs at every segment coordinate, so
/// both genomes express identical segment vectors. Throws ArityMismatch.
DirectGenome convert(const CppnGenome& cppn, const LevelLayout& layout);

/// Random starting individual for the mode (CPPN unless Direct2Gan).
Genome random_genome(EncodingMode mode, const LevelLayout& layout, Rng& rng);

struct ReproductionConfig {
  double conversion_probability = 0.30;
  double crossover_probability = 0.50;
  CppnMutationRates cppn;
  DirectMutationRates direct;
};

/// Defaults for a mode: conversion disabled except for CppnThenDirect2Gan.
ReproductionConfig reproduction_defaults(EncodingMode mode);

struct ReproductionLog {
  bool converted = false;
  bool crossover_fired = false;
  bool crossed = false;
  bool crossover_cancelled = false;
};

/// Draws the second parent on demand (only when a crossover coin fires).
using ParentSampler = std::function<const Genome&(Rng&)>;

/// One offspring. Decision order: conversion (CPPN parents only), then the
/// crossover coin, then mutation. A converted child is mutated as a direct
/// genome straight away. Parents of different kinds cancel the crossover and
/// the first parent is mutated alone. Direct genomes never become CPPNs.
Genome reproduce(const Genome& parent1, const ParentSampler& second_parent, const LevelLayout& layout,
                 Rng& rng, const ReproductionConfig& config, ReproductionLog* log = nullptr);

}  // namespace levelgen
