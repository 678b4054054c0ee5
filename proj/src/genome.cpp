#include "levelgen/genome.hpp"

#include "levelgen/errors.hpp"

#include <string>

namespace levelgen {

using nlohmann::json;

std::string_view to_string(GenomeKind kind)
{
  return kind == GenomeKind::Cppn ? "cppn" : "direct";
}

std::string_view to_string(Provenance p)
{
  switch (p) {
    case Provenance::Initial: return "initial";
    case Provenance::Mutated: return "mutated";
    case Provenance::Crossed: return "crossed";
    case Provenance::Converted: return "converted";
  }
  return "initial";
}

namespace {

Provenance parse_provenance(const std::string& s)
{
  for (auto p : {Provenance::Initial, Provenance::Mutated, Provenance::Crossed, Provenance::Converted}) {
    if (to_string(p) == s) return p;
  }
  throw InvalidGenome("unknown provenance '" + s + "'");
}

}  // namespace

json Genome::to_json() const
{
  json j = {{"kind", to_string(kind())}, {"provenance", to_string(provenance)}};
  if (is_cppn()) {
    j["cppn"] = cppn().to_json();
  } else {
    j["direct"] = direct().to_json();
  }
  return j;
}

Genome Genome::from_json(const json& j)
{
  Genome g;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "cppn") {
    g.body = CppnGenome::from_json(j.at("cppn"));
  } else if (kind == "direct") {
    g.body = DirectGenome::from_json(j.at("direct"));
  } else {
    throw InvalidGenome("unknown genome kind '" + kind + "'");
  }
  g.provenance = parse_provenance(j.at("provenance").get<std::string>());
  return g;
}

std::string_view to_string(EncodingMode mode)
{
  switch (mode) {
    case EncodingMode::Cppn2Gan: return "cppn2gan";
    case EncodingMode::Direct2Gan: return "direct2gan";
    case EncodingMode::CppnThenDirect2Gan: return "cppn_then_direct2gan";
  }
  return "cppn2gan";
}

EncodingMode parse_encoding_mode(std::string_view text)
{
  for (auto m : {EncodingMode::Cppn2Gan, EncodingMode::Direct2Gan, EncodingMode::CppnThenDirect2Gan}) {
    if (to_string(m) == text) return m;
  }
  throw ConfigError("unknown encoding mode '" + std::string(text) +
                    "' (expected cppn2gan, direct2gan or cppn_then_direct2gan)");
}

namespace {

void check_arity(const CppnGenome& cppn, const LevelLayout& layout)
{
  if (cppn.input_count() != layout.cppn_inputs() || cppn.output_count() != layout.segment_width()) {
    throw ArityMismatch("CPPN with " + std::to_string(cppn.input_count()) + " inputs / " +
                        std::to_string(cppn.output_count()) + " outputs does not fit a layout needing " +
                        std::to_string(layout.cppn_inputs()) + " / " + std::to_string(layout.segment_width()));
  }
}

}  // namespace

std::vector<std::vector<double>> express(const Genome& genome, const LevelLayout& layout)
{
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(layout.segment_count()));
  if (genome.is_cppn()) {
    check_arity(genome.cppn(), layout);
    for (int i = 0; i < layout.segment_count(); ++i) {
      out.push_back(genome.cppn().query(segment_inputs(layout, i)));
    }
  } else {
    if (!(genome.direct().layout() == layout)) {
      throw LayoutMismatch("direct genome layout differs from the level layout");
    }
    for (int i = 0; i < layout.segment_count(); ++i) {
      const auto seg = genome.direct().segment(i);
      out.emplace_back(seg.begin(), seg.end());
    }
  }
  return out;
}

DirectGenome convert(const CppnGenome& cppn, const LevelLayout& layout)
{
  check_arity(cppn, layout);
  std::vector<double> values;
  values.reserve(layout.genome_length());
  for (int i = 0; i < layout.segment_count(); ++i) {
    const auto out = cppn.query(segment_inputs(layout, i));
    values.insert(values.end(), out.begin(), out.end());
  }
  return DirectGenome(layout, std::move(values));
}

Genome random_genome(EncodingMode mode, const LevelLayout& layout, Rng& rng)
{
  if (mode == EncodingMode::Direct2Gan) {
    return {DirectGenome::random(layout, rng), Provenance::Initial};
  }
  return {CppnGenome::initial(layout.cppn_inputs(), layout.segment_width(), rng), Provenance::Initial};
}

ReproductionConfig reproduction_defaults(EncodingMode mode)
{
  ReproductionConfig c;
  if (mode != EncodingMode::CppnThenDirect2Gan) {
    c.conversion_probability = 0.0;
  }
  return c;
}

Genome reproduce(const Genome& parent1, const ParentSampler& second_parent, const LevelLayout& layout,
                 Rng& rng, const ReproductionConfig& config, ReproductionLog* log)
{
  ReproductionLog local;
  Genome child;

  if (parent1.is_cppn() && config.conversion_probability > 0.0 && rng.chance(config.conversion_probability)) {
    local.converted = true;
    child = {mutate(convert(parent1.cppn(), layout), rng, config.direct), Provenance::Converted};
    if (log) *log = local;
    return child;
  }

  const Genome* mate = nullptr;
  if (rng.chance(config.crossover_probability)) {
    local.crossover_fired = true;
    const Genome& candidate = second_parent(rng);
    if (candidate.kind() == parent1.kind()) {
      mate = &candidate;
    } else {
      local.crossover_cancelled = true;
    }
  }

  if (parent1.is_cppn()) {
    CppnGenome base = mate ? crossover(parent1.cppn(), mate->cppn(), rng) : parent1.cppn();
    child.body = mutate(base, rng, config.cppn);
  } else {
    DirectGenome base = mate ? crossover(parent1.direct(), mate->direct(), rng) : parent1.direct();
    child.body = mutate(base, rng, config.direct);
  }
  local.crossed = mate != nullptr;
  child.provenance = mate ? Provenance::Crossed : Provenance::Mutated;
  if (log) *log = local;
  return child;
}

}  // namespace levelgen
