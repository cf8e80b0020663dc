#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "wsc/knowledge.hpp"

namespace wsc::detail {

/// A component with local indexing, adjacency and refinement colors.
struct ColoredComponent {
  struct Adj {
    RelationIdx relation;
    std::uint8_t dir;  // 0 out, 1 in, 2 self-loop
    std::uint32_t other;
  };

  std::vector<ObjectId> nodes;
  std::unordered_map<ObjectId, std::uint32_t> local;
  std::vector<std::vector<Adj>> adj;
  std::vector<ConceptIdx> type;
  std::vector<std::uint64_t> color;
  std::size_t edge_count = 0;
  std::uint64_t signature = 0;  // order-independent digest of the whole component

  std::uint64_t digest(std::uint32_t local_index) const;
};

/// Builds the component of `root`; when `refine` is false colors are the
/// bare concepts and the signature only covers sizes. Components compared
/// with each other must use the same `max_rounds`.
ColoredComponent color_component(const KnowledgeState& state, ObjectId root, bool refine,
                                 std::uint32_t max_rounds = 0xFFFFFFFFU);

/// Exact search for an isomorphism A -> B mapping a to b. Colors prune the
/// candidate sets, so both components must be built with the same `refine`.
bool isomorphic_at(const KnowledgeState& state, const ColoredComponent& A, std::uint32_t a,
                   const ColoredComponent& B, std::uint32_t b);

/// True iff some object in `candidates` is similar to `obj`.
bool has_similar(const KnowledgeState& state, ObjectId obj, std::span<const ObjectId> candidates);

}  // namespace wsc::detail
