#pragma once

#include "levelgen/activation.hpp"
#include "levelgen/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace levelgen {

enum class NodeRole { Input, Hidden, Output };

struct CppnNode {
  std::uint64_t id = 0;
  NodeRole role = NodeRole::Hidden;
  ActivationKind activation = ActivationKind::Identity;

  friend bool operator==(const CppnNode&, const CppnNode&) = default;
};

struct CppnLink {
  std::uint64_t innovation = 0;
  std::uint64_t source = 0;
  std::uint64_t target = 0;
  double weight = 0.0;
  bool enabled = true;

  friend bool operator==(const CppnLink&, const CppnLink&) = default;
};

/// Innovation number of the link source -> target. Structurally identical
/// mutations in different lineages receive the same number, so crossover can
/// align genes without a global counter.
std::uint64_t link_innovation(std::uint64_t source, std::uint64_t target) noexcept;

/// Feed-forward CPPN. Input nodes carry ids 0..inputs-1, output nodes
/// inputs..inputs+outputs-1; hidden nodes use hashed ids with the top bit set.
///
/// The graph formed by all links, enabled or not, is acyclic; this is checked
/// on construction. Outputs are clamped to [-1, 1] after activation.
class CppnGenome {
public:
  CppnGenome() = default;
  CppnGenome(int inputs, int outputs, std::vector<CppnNode> nodes, std::vector<CppnLink> links);

  /// Inputs fully connected to outputs, weights uniform in [-1, 1], random
  /// output activations, no hidden nodes.
  static CppnGenome initial(int inputs, int outputs, Rng& rng);

  int input_count() const noexcept { return inputs_; }
  int output_count() const noexcept { return outputs_; }
  const std::vector<CppnNode>& nodes() const noexcept { return nodes_; }
  const std::vector<CppnLink>& links() const noexcept { return links_; }
  std::size_t hidden_count() const noexcept { return nodes_.size() - static_cast<std::size_t>(inputs_ + outputs_); }

  std::vector<double> query(std::span<const double> inputs) const;

  /// Index into nodes() of the node with `id`, or -1.
  int node_index(std::uint64_t id) const noexcept;

  nlohmann::json to_json() const;
  static CppnGenome from_json(const nlohmann::json& j);

  friend bool operator==(const CppnGenome& a, const CppnGenome& b)
  {
    return a.inputs_ == b.inputs_ && a.outputs_ == b.outputs_ && a.nodes_ == b.nodes_ &&
           a.links_ == b.links_;
  }

private:
  struct Incoming {
    int source;
    double weight;
  };

  void build_plan();

  int inputs_ = 0;
  int outputs_ = 0;
  std::vector<CppnNode> nodes_;
  std::vector<CppnLink> links_;
  // Evaluation plan: non-input node indices in topological order and their enabled in-links.
  std::vector<int> order_;
  std::vector<std::vector<Incoming>> incoming_;
};

struct CppnMutationRates {
  double splice = 0.20;
  double add_link = 0.40;
  double swap_activation = 0.30;
  double perturb_per_link = 0.05;
  double perturb_sigma = 0.5;
  double weight_limit = 5.0;
};

/// Which mutation events fired (coin landed) and which changed the genome.
struct CppnMutationLog {
  bool splice_fired = false;
  bool spliced = false;
  bool add_link_fired = false;
  bool linked = false;
  bool swap_fired = false;
  bool swapped = false;
  int perturbed = 0;
};

CppnGenome mutate(const CppnGenome& genome, Rng& rng, const CppnMutationRates& rates = {},
                  CppnMutationLog* log = nullptr);

/// Links aligned by innovation number. Matching links take weight and enabled
/// flag from either parent with equal chance; disjoint and excess links, and
/// all nodes, come from `a`.
CppnGenome crossover(const CppnGenome& a, const CppnGenome& b, Rng& rng);

}  // namespace levelgen
