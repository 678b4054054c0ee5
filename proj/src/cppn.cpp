#include "levelgen/cppn.hpp"

#include "levelgen/errors.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <unordered_map>
#include <utility>

namespace levelgen {

using nlohmann::json;

namespace {

constexpr std::uint64_t kHiddenBit = 1ULL << 63;

std::uint64_t splice_node_id(std::uint64_t innovation, std::uint64_t salt) noexcept
{
  return mix_seed(innovation, 0x5A1CE000ULL + salt) | kHiddenBit;
}

std::string_view role_name(NodeRole r)
{
  switch (r) {
    case NodeRole::Input: return "input";
    case NodeRole::Hidden: return "hidden";
    case NodeRole::Output: return "output";
  }
  return "hidden";
}

NodeRole parse_role(const std::string& s)
{
  if (s == "input") return NodeRole::Input;
  if (s == "hidden") return NodeRole::Hidden;
  if (s == "output") return NodeRole::Output;
  throw InvalidGenome("unknown node role '" + s + "'");
}

ActivationKind random_activation(Rng& rng)
{
  return kAllActivations[rng.index(kAllActivations.size())];
}

}  // namespace

std::string_view to_string(ActivationKind kind)
{
  switch (kind) {
    case ActivationKind::Sawtooth: return "sawtooth";
    case ActivationKind::LinearPiecewise: return "linear_piecewise";
    case ActivationKind::Identity: return "identity";
    case ActivationKind::Square: return "square";
    case ActivationKind::Cosine: return "cosine";
    case ActivationKind::Sine: return "sine";
    case ActivationKind::Sigmoid: return "sigmoid";
    case ActivationKind::Gaussian: return "gaussian";
    case ActivationKind::Triangle: return "triangle";
    case ActivationKind::Absolute: return "absolute";
  }
  return "identity";
}

std::optional<ActivationKind> parse_activation(std::string_view name)
{
  for (auto k : kAllActivations) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::uint64_t link_innovation(std::uint64_t source, std::uint64_t target) noexcept
{
  return mix_seed(source * 0x9E3779B97F4A7C15ULL + 0x11, target) >> 1;
}

CppnGenome::CppnGenome(int inputs, int outputs, std::vector<CppnNode> nodes, std::vector<CppnLink> links)
    : inputs_(inputs), outputs_(outputs), nodes_(std::move(nodes)), links_(std::move(links))
{
  build_plan();
}

int CppnGenome::node_index(std::uint64_t id) const noexcept
{
  // Fixed nodes sit at their id; hidden nodes follow in insertion order.
  const auto fixed = static_cast<std::uint64_t>(inputs_ + outputs_);
  if (id < fixed && id < nodes_.size() && nodes_[id].id == id) {
    return static_cast<int>(id);
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

void CppnGenome::build_plan()
{
  if (inputs_ < 1 || outputs_ < 1) {
    throw InvalidGenome("CPPN needs at least one input and one output");
  }
  const auto fixed = static_cast<std::size_t>(inputs_ + outputs_);
  if (nodes_.size() < fixed) {
    throw InvalidGenome("CPPN is missing input or output nodes");
  }
  std::unordered_map<std::uint64_t, int> index;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    const NodeRole expected = i < static_cast<std::size_t>(inputs_) ? NodeRole::Input
                              : i < fixed                          ? NodeRole::Output
                                                                   : NodeRole::Hidden;
    if (n.role != expected || (i < fixed && n.id != i)) {
      throw InvalidGenome("CPPN node " + std::to_string(i) + " has unexpected role or id");
    }
    if (!index.emplace(n.id, static_cast<int>(i)).second) {
      throw InvalidGenome("duplicate CPPN node id " + std::to_string(n.id));
    }
  }

  const std::size_t count = nodes_.size();
  std::vector<std::vector<int>> out_edges(count);
  std::vector<int> indegree(count, 0);
  incoming_.assign(count, {});
  std::set<std::uint64_t> innovations;
  std::set<std::pair<std::uint64_t, std::uint64_t>> pairs;
  for (const auto& l : links_) {
    const auto s = index.find(l.source);
    const auto t = index.find(l.target);
    if (s == index.end() || t == index.end()) {
      throw InvalidGenome("CPPN link " + std::to_string(l.innovation) + " references a missing node");
    }
    if (nodes_[static_cast<std::size_t>(t->second)].role == NodeRole::Input ||
        nodes_[static_cast<std::size_t>(s->second)].role == NodeRole::Output) {
      throw InvalidGenome("CPPN link " + std::to_string(l.innovation) + " points into an input or out of an output");
    }
    if (!innovations.insert(l.innovation).second) {
      throw InvalidGenome("duplicate innovation number " + std::to_string(l.innovation));
    }
    if (!pairs.emplace(l.source, l.target).second) {
      throw InvalidGenome("duplicate CPPN link between the same nodes");
    }
    out_edges[static_cast<std::size_t>(s->second)].push_back(t->second);
    ++indegree[static_cast<std::size_t>(t->second)];
    if (l.enabled) {
      incoming_[static_cast<std::size_t>(t->second)].push_back({s->second, l.weight});
    }
  }

  // Kahn's algorithm with lowest-index-first tie breaking.
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (std::size_t i = 0; i < count; ++i) {
    if (indegree[i] == 0) ready.push(static_cast<int>(i));
  }
  order_.clear();
  std::size_t visited = 0;
  while (!ready.empty()) {
    const int n = ready.top();
    ready.pop();
    ++visited;
    if (nodes_[static_cast<std::size_t>(n)].role != NodeRole::Input) {
      order_.push_back(n);
    }
    for (int m : out_edges[static_cast<std::size_t>(n)]) {
      if (--indegree[static_cast<std::size_t>(m)] == 0) ready.push(m);
    }
  }
  if (visited != count) {
    throw InvalidGenome("CPPN contains a cycle");
  }
}

CppnGenome CppnGenome::initial(int inputs, int outputs, Rng& rng)
{
  std::vector<CppnNode> nodes;
  for (int i = 0; i < inputs; ++i) {
    nodes.push_back({static_cast<std::uint64_t>(i), NodeRole::Input, ActivationKind::Identity});
  }
  for (int o = 0; o < outputs; ++o) {
    nodes.push_back({static_cast<std::uint64_t>(inputs + o), NodeRole::Output, random_activation(rng)});
  }
  std::vector<CppnLink> links;
  for (int i = 0; i < inputs; ++i) {
    for (int o = 0; o < outputs; ++o) {
      const auto s = static_cast<std::uint64_t>(i);
      const auto t = static_cast<std::uint64_t>(inputs + o);
      links.push_back({link_innovation(s, t), s, t, rng.uniform(-1.0, 1.0), true});
    }
  }
  return CppnGenome(inputs, outputs, std::move(nodes), std::move(links));
}

std::vector<double> CppnGenome::query(std::span<const double> inputs) const
{
  if (static_cast<int>(inputs.size()) != inputs_) {
    throw ArityMismatch("CPPN expects " + std::to_string(inputs_) + " inputs, got " +
                        std::to_string(inputs.size()));
  }
  std::vector<double> value(nodes_.size(), 0.0);
  std::copy(inputs.begin(), inputs.end(), value.begin());
  for (int n : order_) {
    double sum = 0.0;
    for (const auto& in : incoming_[static_cast<std::size_t>(n)]) {
      sum += in.weight * value[static_cast<std::size_t>(in.source)];
    }
    value[static_cast<std::size_t>(n)] = activate(nodes_[static_cast<std::size_t>(n)].activation, sum);
  }
  std::vector<double> out(static_cast<std::size_t>(outputs_));
  for (int o = 0; o < outputs_; ++o) {
    out[static_cast<std::size_t>(o)] =
        std::clamp(value[static_cast<std::size_t>(inputs_ + o)], -1.0, 1.0);
  }
  return out;
}

json CppnGenome::to_json() const
{
  json nodes = json::array();
  for (const auto& n : nodes_) {
    nodes.push_back({{"id", n.id}, {"role", role_name(n.role)}, {"activation", to_string(n.activation)}});
  }
  json links = json::array();
  for (const auto& l : links_) {
    links.push_back({{"innovation", l.innovation},
                     {"source", l.source},
                     {"target", l.target},
                     {"weight", l.weight},
                     {"enabled", l.enabled}});
  }
  return {{"inputs", inputs_}, {"outputs", outputs_}, {"nodes", nodes}, {"links", links}};
}

CppnGenome CppnGenome::from_json(const json& j)
{
  std::vector<CppnNode> nodes;
  for (const auto& n : j.at("nodes")) {
    const auto act = parse_activation(n.at("activation").get<std::string>());
    if (!act) {
      throw InvalidGenome("unknown activation " + n.at("activation").dump());
    }
    nodes.push_back({n.at("id").get<std::uint64_t>(), parse_role(n.at("role").get<std::string>()), *act});
  }
  std::vector<CppnLink> links;
  for (const auto& l : j.at("links")) {
    links.push_back({l.at("innovation").get<std::uint64_t>(), l.at("source").get<std::uint64_t>(),
                     l.at("target").get<std::uint64_t>(), l.at("weight").get<double>(),
                     l.at("enabled").get<bool>()});
  }
  return CppnGenome(j.at("inputs").get<int>(), j.at("outputs").get<int>(), std::move(nodes),
                    std::move(links));
}

namespace {

/// reach[i][j] is true when a directed path i -> j exists over all links.
std::vector<std::vector<bool>> reachability(const CppnGenome& g)
{
  const std::size_t n = g.nodes().size();
  std::vector<std::vector<int>> adj(n);
  for (const auto& l : g.links()) {
    adj[static_cast<std::size_t>(g.node_index(l.source))].push_back(g.node_index(l.target));
  }
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<int> stack{static_cast<int>(s)};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj[static_cast<std::size_t>(v)]) {
        if (!reach[s][static_cast<std::size_t>(w)]) {
          reach[s][static_cast<std::size_t>(w)] = true;
          stack.push_back(w);
        }
      }
    }
  }
  return reach;
}

}  // namespace

CppnGenome mutate(const CppnGenome& genome, Rng& rng, const CppnMutationRates& rates, CppnMutationLog* log)
{
  CppnMutationLog local;
  const int inputs = genome.input_count();
  const int outputs = genome.output_count();
  std::vector<CppnNode> nodes = genome.nodes();
  std::vector<CppnLink> links = genome.links();
  bool changed = false;

  if (rng.chance(rates.splice)) {
    local.splice_fired = true;
    std::vector<std::size_t> enabled;
    for (std::size_t i = 0; i < links.size(); ++i) {
      if (links[i].enabled) enabled.push_back(i);
    }
    if (!enabled.empty()) {
      CppnLink& old = links[enabled[rng.index(enabled.size())]];
      old.enabled = false;
      std::uint64_t salt = 0;
      std::uint64_t id = splice_node_id(old.innovation, salt);
      auto taken = [&nodes](std::uint64_t candidate) {
        return std::any_of(nodes.begin(), nodes.end(), [candidate](const CppnNode& n) { return n.id == candidate; });
      };
      while (taken(id)) {
        id = splice_node_id(old.innovation, ++salt);
      }
      nodes.push_back({id, NodeRole::Hidden, random_activation(rng)});
      const CppnLink in{link_innovation(old.source, id), old.source, id, 1.0, true};
      const CppnLink out{link_innovation(id, old.target), id, old.target, old.weight, true};
      links.push_back(in);
      links.push_back(out);
      local.spliced = true;
      changed = true;
    }
  }

  if (rng.chance(rates.add_link)) {
    local.add_link_fired = true;
    const CppnGenome current = changed ? CppnGenome(inputs, outputs, nodes, links) : genome;
    const auto reach = reachability(current);
    std::set<std::pair<std::uint64_t, std::uint64_t>> existing;
    for (const auto& l : links) existing.emplace(l.source, l.target);
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t s = 0; s < nodes.size(); ++s) {
      if (nodes[s].role == NodeRole::Output) continue;
      for (std::size_t t = 0; t < nodes.size(); ++t) {
        if (t == s || nodes[t].role == NodeRole::Input) continue;
        if (existing.count({nodes[s].id, nodes[t].id}) || reach[t][s]) continue;
        candidates.emplace_back(s, t);
      }
    }
    if (!candidates.empty()) {
      const auto [s, t] = candidates[rng.index(candidates.size())];
      links.push_back({link_innovation(nodes[s].id, nodes[t].id), nodes[s].id, nodes[t].id,
                       rng.uniform(-1.0, 1.0), true});
      local.linked = true;
      changed = true;
    }
  }

  if (rng.chance(rates.swap_activation)) {
    local.swap_fired = true;
    const std::size_t first = static_cast<std::size_t>(inputs);
    if (nodes.size() > first) {
      CppnNode& node = nodes[first + rng.index(nodes.size() - first)];
      auto next = kAllActivations[rng.index(kAllActivations.size() - 1)];
      if (next == node.activation) next = kAllActivations.back();
      node.activation = next;
      local.swapped = true;
      changed = true;
    }
  }

  for (auto& l : links) {
    if (rng.chance(rates.perturb_per_link)) {
      l.weight = std::clamp(l.weight + rates.perturb_sigma * rng.gaussian(), -rates.weight_limit,
                            rates.weight_limit);
      ++local.perturbed;
      changed = true;
    }
  }

  if (log) *log = local;
  if (!changed) return genome;
  return CppnGenome(inputs, outputs, std::move(nodes), std::move(links));
}

CppnGenome crossover(const CppnGenome& a, const CppnGenome& b, Rng& rng)
{
  if (a.input_count() != b.input_count() || a.output_count() != b.output_count()) {
    throw ArityMismatch("crossover parents have different input/output arities");
  }
  std::unordered_map<std::uint64_t, const CppnLink*> other;
  for (const auto& l : b.links()) other.emplace(l.innovation, &l);

  std::vector<CppnLink> links = a.links();
  for (auto& l : links) {
    const auto it = other.find(l.innovation);
    if (it == other.end()) continue;
    if (rng.chance(0.5)) {
      l.weight = it->second->weight;
      l.enabled = it->second->enabled;
    }
  }
  return CppnGenome(a.input_count(), a.output_count(), a.nodes(), std::move(links));
}

}  // namespace levelgen
