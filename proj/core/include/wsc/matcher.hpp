#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "wsc/knowledge.hpp"
#include "wsc/ontology.hpp"
#include "wsc/service.hpp"

namespace wsc {

struct QueryNode {
  enum class Kind { Concept, Any, Pinned };

  std::string param;
  Kind kind = Kind::Any;
  ConceptIdx type = 0;  // Kind::Concept
  ObjectId pinned;         // Kind::Pinned
};

struct QueryEdge {
  RelationIdx relation = 0;
  std::uint32_t from = 0;
  std::uint32_t to = 0;
};

/// Pattern built from a service: one node per input, one directed edge per
/// precondition atom.
struct QueryGraph {
  std::vector<QueryNode> nodes;
  std::vector<QueryEdge> edges;
};

using Pins = std::vector<std::pair<std::string, ObjectId>>;

/// Throws PinTargetMissing when a pin names something that is not an input.
QueryGraph build_query_graph(const Ontology& ontology, const Service& service, const Pins& pins = {});

/// Labeled view of a knowledge state. Each node carries the set of all
/// supertypes of its object's concept. Nodes are kept in ObjectId order and
/// the graph can be synced forward as the state grows.
class DataGraph {
 public:
  explicit DataGraph(const Ontology& ontology) : ontology_(&ontology) {}

  static DataGraph build(const Ontology& ontology, const KnowledgeState& state);

  /// Ingests objects and edges added to `state` since the last sync.
  void sync(const KnowledgeState& state);

  const Ontology& ontology() const noexcept { return *ontology_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  ObjectId object(std::uint32_t node) const { return nodes_[node]; }
  ConceptIdx type(std::uint32_t node) const { return concepts_[node]; }
  std::optional<std::uint32_t> node_of(ObjectId id) const;

  std::span<const ConceptIdx> label_set(std::uint32_t node) const {
    return ontology_->supertypes(concepts_[node]);
  }
  bool has_label(std::uint32_t node, ConceptIdx c) const {
    return ontology_->is_subtype(concepts_[node], c);
  }
  /// Nodes whose label set contains `c`, ascending.
  std::span<const std::uint32_t> candidates(ConceptIdx c) const;

  bool has_edge(RelationIdx r, std::uint32_t from, std::uint32_t to) const;
  /// (relation, neighbor) pairs.
  const std::vector<std::pair<RelationIdx, std::uint32_t>>& out(std::uint32_t node) const {
    return out_[node];
  }
  const std::vector<std::pair<RelationIdx, std::uint32_t>>& in(std::uint32_t node) const {
    return in_[node];
  }
  std::uint32_t out_degree(std::uint32_t node, RelationIdx r) const;
  std::uint32_t in_degree(std::uint32_t node, RelationIdx r) const;

 private:
  static std::uint64_t degree_key(std::uint32_t node, RelationIdx r) {
    return (std::uint64_t{node} << 32) | r;
  }

  const Ontology* ontology_;
  std::size_t synced_objects_ = 0;
  std::size_t synced_edges_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<ObjectId> nodes_;
  std::vector<ConceptIdx> concepts_;
  std::unordered_map<std::uint32_t, std::uint32_t> node_of_;
  std::vector<std::vector<std::uint32_t>> by_label_;
  std::vector<std::vector<std::pair<RelationIdx, std::uint32_t>>> out_;
  std::vector<std::vector<std::pair<RelationIdx, std::uint32_t>>> in_;
  std::unordered_set<RelationEdge, RelationEdgeHash> edge_keys_;  // endpoints are node indices
  std::unordered_map<std::uint64_t, std::uint32_t> out_degree_;
  std::unordered_map<std::uint64_t, std::uint32_t> in_degree_;
};

struct MatchConfig {
  enum class Mode { FirstOnly, All };

  bool injective = false;
  Mode mode = Mode::All;
  std::optional<std::size_t> limit;  // All mode: LimitExceeded when overflowed
  bool prune = true;                 // search ordering + label/degree pruning
};

/// Backtracking enumeration of bindings of `query` into `data`. In All mode
/// results are sorted lexicographically by object ids in query node order.
/// FirstOnly returns the first binding found by the search.
std::vector<Binding> enumerate_matches(const QueryGraph& query, const DataGraph& data,
                                       const MatchConfig& config = {});

/// Matches each weakly connected component of the query on its own and
/// combines the results. Same result set as enumerate_matches.
std::vector<Binding> split_and_match(const QueryGraph& query, const DataGraph& data,
                                     const MatchConfig& config = {});

/// All-mode bindings of split_and_match streamed to `visit` in the same
/// sorted order, without building the list. The binding passed in is
/// only valid during the call; returning false stops the walk.
/// `config.mode` is ignored.
void for_each_match(const QueryGraph& query, const DataGraph& data, const MatchConfig& config,
                    const std::function<bool(const Binding&)>& visit);

/// Direct check of both matching conditions (labels, edges) for one
/// binding, plus injectivity when requested.
bool binding_satisfies(const QueryGraph& query, const DataGraph& data, const Binding& binding,
                       bool injective = false);

/// Weakly connected components of the query, as lists of node indices.
std::vector<std::vector<std::uint32_t>> query_components(const QueryGraph& query);

}  // namespace wsc
