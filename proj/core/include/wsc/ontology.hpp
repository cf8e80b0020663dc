#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wsc {

using ConceptIdx = std::uint32_t;
using RelationIdx = std::uint32_t;

/// A binary relation instance over named parameters, `relation(from, to)`.
struct RelationAtom {
  std::string relation;
  std::string from;
  std::string to;

  friend auto operator<=>(const RelationAtom&, const RelationAtom&) = default;
};

struct RelationDef {
  std::string name;
  bool transitive = false;
  bool symmetric = false;

  friend bool operator==(const RelationDef&, const RelationDef&) = default;
};

/// Declared `sub subtypeOf super` edge.
struct SubtypeEdge {
  std::string sub;
  std::string super;

  friend auto operator<=>(const SubtypeEdge&, const SubtypeEdge&) = default;
};

/// Untyped implication over local parameters: when every precondition holds
/// for some assignment of objects to parameters, the effects are asserted.
struct InferenceRule {
  std::string name;
  std::vector<std::string> parameters;
  std::vector<RelationAtom> preconditions;
  std::vector<RelationAtom> effects;

  friend bool operator==(const InferenceRule&, const InferenceRule&) = default;
};

/// The static semantic world: concepts with a subtype DAG, relation
/// definitions and inference rules. Immutable once built; the
/// reflexive-transitive subtype closure is computed eagerly.
class Ontology {
 public:
  Ontology() = default;

  /// Validates and assembles an ontology. Throws wsc::Error with one of
  /// CycleInSubtypeGraph, UnknownConcept, DuplicateName,
  /// UnknownRelationInRule, UndeclaredRuleParameter, EmptyRuleEffects.
  static Ontology build(std::vector<std::string> concepts, std::vector<SubtypeEdge> subtype_edges,
                        std::vector<RelationDef> relations, std::vector<InferenceRule> rules);

  const std::vector<std::string>& concepts() const noexcept { return concepts_; }
  const std::vector<SubtypeEdge>& subtype_edges() const noexcept { return subtype_edges_; }
  const std::vector<RelationDef>& relations() const noexcept { return relations_; }
  /// Rules as declared in the document.
  const std::vector<InferenceRule>& rules() const noexcept { return rules_; }
  /// Declared rules followed by the rules compiled from relation properties
  /// (in relation declaration order).
  const std::vector<InferenceRule>& effective_rules() const noexcept { return effective_rules_; }

  std::size_t concept_count() const noexcept { return concepts_.size(); }
  std::optional<ConceptIdx> find_concept(std::string_view name) const;
  ConceptIdx concept_index(std::string_view name) const;  // throws UnknownConcept
  const std::string& concept_name(ConceptIdx idx) const { return concepts_.at(idx); }

  std::optional<RelationIdx> find_relation(std::string_view name) const;
  RelationIdx relation_index(std::string_view name) const;  // throws UnknownRelation
  const RelationDef& relation(RelationIdx idx) const { return relations_.at(idx); }

  /// True iff (sub, super) is in the reflexive-transitive subtype closure.
  bool is_subtype(std::string_view sub, std::string_view super) const;
  bool is_subtype(ConceptIdx sub, ConceptIdx super) const noexcept {
    return ((closure_[sub][super / 64] >> (super % 64)) & 1U) != 0;
  }

  /// All concepts `c` with `is_subtype(idx, c)`, ascending, including idx.
  std::span<const ConceptIdx> supertypes(ConceptIdx idx) const { return supertypes_.at(idx); }
  /// All concepts `c` with `is_subtype(c, idx)`, ascending, including idx.
  std::span<const ConceptIdx> subtypes(ConceptIdx idx) const { return subtypes_.at(idx); }

  /// The closure as name pairs, sorted. Independent of declaration order.
  std::vector<std::pair<std::string, std::string>> closure_pairs() const;

 private:
  std::vector<std::string> concepts_;
  std::vector<SubtypeEdge> subtype_edges_;
  std::vector<RelationDef> relations_;
  std::vector<InferenceRule> rules_;
  std::vector<InferenceRule> effective_rules_;

  std::unordered_map<std::string, ConceptIdx> concept_ids_;
  std::unordered_map<std::string, RelationIdx> relation_ids_;
  std::vector<std::vector<std::uint64_t>> closure_;
  std::vector<std::vector<ConceptIdx>> supertypes_;
  std::vector<std::vector<ConceptIdx>> subtypes_;
};

/// Compiles relation properties into ordinary inference rules: symmetry
/// becomes r(X,Y) => r(Y,X), transitivity r(X,Y), r(Y,Z) => r(X,Z).
std::vector<InferenceRule> property_rules(const RelationDef& relation);

/// Checks a rule against an ontology's relation set. Throws
/// UndeclaredRuleParameter, UnknownRelationInRule, EmptyRuleEffects or
/// DuplicateName (repeated parameter).
void validate_rule(const Ontology& ontology, const InferenceRule& rule);

}  // namespace wsc
