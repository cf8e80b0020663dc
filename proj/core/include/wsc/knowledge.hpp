#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "wsc/ontology.hpp"
#include "wsc/service.hpp"

namespace wsc {

struct ObjectId {
  std::uint32_t value = 0;

  friend auto operator<=>(const ObjectId&, const ObjectId&) = default;
};

/// Maps each input of a service (by position) to the object bound to it.
using Binding = std::vector<ObjectId>;

struct Provenance {
  enum class Kind { FromRequest, FromCall };

  Kind kind = Kind::FromRequest;
  std::string param;
  std::size_t call_index = 0;  // meaningful for FromCall only

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ObjectInstance {
  ObjectId id;
  ConceptIdx type = 0;
  Provenance provenance;

  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

struct RelationEdge {
  RelationIdx relation = 0;
  ObjectId src;
  ObjectId dst;

  friend auto operator<=>(const RelationEdge&, const RelationEdge&) = default;
};

struct RelationEdgeHash {
  std::size_t operator()(const RelationEdge& e) const noexcept {
    std::uint64_t h = (std::uint64_t{e.src.value} << 32) ^ e.dst.value;
    h ^= std::uint64_t{e.relation} * 0x9E3779B97F4A7C15ULL;
    h ^= h >> 29;
    h *= 0xBF58476D1CE4E5B9ULL;
    return static_cast<std::size_t>(h ^ (h >> 32));
  }
};

/// The dynamic knowledge: typed objects and labeled directed relation
/// edges. Grows monotonically; `rollback` exists only to undo tentative
/// calls and never rewinds the id counter, so ids are never reused.
class KnowledgeState {
 public:
  struct Checkpoint {
    std::size_t objects = 0;
    std::size_t edges = 0;
  };

  const std::vector<ObjectInstance>& objects() const noexcept { return objects_; }
  /// Edges in insertion order.
  const std::vector<RelationEdge>& edges() const noexcept { return edges_; }
  std::uint32_t next_id() const noexcept { return next_id_; }

  bool contains(ObjectId id) const noexcept {
    return id.value < slot_.size() && slot_[id.value] != kNoSlot;
  }
  const ObjectInstance& object(ObjectId id) const;  // throws UnknownObject
  bool has_edge(const RelationEdge& edge) const { return edge_set_.contains(edge); }

  ObjectId add_object(ConceptIdx type, Provenance provenance);
  /// Consumes `n` ids without creating objects.
  void skip_ids(std::size_t n);
  /// Inserts the edge unless present. Returns whether it was new.
  bool add_edge(const RelationEdge& edge);

  /// Indices into edges() of every edge touching `id` (either direction).
  const std::vector<std::size_t>& incident(ObjectId id) const;

  Checkpoint checkpoint() const noexcept { return {objects_.size(), edges_.size()}; }
  void rollback(const Checkpoint& cp);

  /// Node and edge count of the weakly connected component holding `id`,
  /// kept up to date incrementally.
  struct ComponentSize {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    friend bool operator==(const ComponentSize&, const ComponentSize&) = default;
  };
  ComponentSize component_size(ObjectId id) const;

 private:
  static constexpr std::uint32_t kNoSlot = 0xFFFFFFFFU;

  std::vector<ObjectInstance> objects_;
  std::vector<RelationEdge> edges_;
  std::unordered_set<RelationEdge, RelationEdgeHash> edge_set_;
  std::vector<std::uint32_t> slot_;  // id -> index in objects_
  std::vector<std::vector<std::size_t>> incident_;
  std::uint32_t next_id_ = 0;

  // Union-find over ids, by size and without path compression so that each
  // edge's merge can be undone. merges_[i] belongs to edges_[i]; a merge of
  // a root with itself just counts the edge.
  struct Merge {
    std::uint32_t child;
    std::uint32_t root;
  };
  std::uint32_t find(std::uint32_t v) const;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> comp_nodes_;
  std::vector<std::uint32_t> comp_edges_;
  std::vector<Merge> merges_;
};

struct InitialKnowledge {
  KnowledgeState state;
  std::vector<ObjectId> provided;  // aligned with request.provided
};

/// One object per provided parameter (ids 0..n-1 in declaration order) and
/// one edge per provided relation.
InitialKnowledge init_from_request(const Ontology& ontology, const Request& request);

struct CallEffects {
  std::vector<std::pair<std::string, ObjectId>> produced;  // output param -> new object
  std::vector<RelationEdge> new_edges;                      // edges that were absent before
};

/// Executes a call on the state: a fresh object per output, then one edge
/// per effect atom (endpoints resolved through the binding and the fresh
/// outputs). Throws UnboundParameter when the binding does not cover the
/// inputs, UnknownObject when it refers to a missing object.
CallEffects apply_call_effects(const Ontology& ontology, KnowledgeState& state,
                               const Service& service, const Binding& binding,
                               std::size_t call_index);

/// Weakly connected component, nodes and edges both sorted.
struct Component {
  std::vector<ObjectId> nodes;
  std::vector<RelationEdge> edges;
};

Component connected_component(const KnowledgeState& state, ObjectId obj);

/// Iterated color-refinement digest of `obj` within its component. Equal
/// digests are necessary (not sufficient) for objects_similar.
std::uint64_t refinement_hash(const KnowledgeState& state, ObjectId obj);

/// True iff some isomorphism between the components of `a` and `b` maps a
/// to b, preserving concepts exactly and directed relation-labelled edges.
bool objects_similar(const KnowledgeState& state, ObjectId a, ObjectId b);

/// Same as objects_similar but without the refinement prefilter. Exists so
/// tests can check the prefilter never changes an answer.
bool objects_similar_exact(const KnowledgeState& state, ObjectId a, ObjectId b);

/// Deterministic text dump: objects by id, then edges sorted by
/// (relation name, src, dst).
void dump_knowledge(std::ostream& out, const Ontology& ontology, const KnowledgeState& state);
std::string dump_knowledge(const Ontology& ontology, const KnowledgeState& state);

}  // namespace wsc

template <>
struct std::hash<wsc::ObjectId> {
  std::size_t operator()(const wsc::ObjectId& id) const noexcept { return id.value; }
};
