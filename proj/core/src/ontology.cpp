#include "wsc/ontology.hpp"

#include <algorithm>
#include <unordered_set>

#include "wsc/error.hpp"

namespace wsc {

namespace {

template <typename Map>
auto lookup(const Map& map, std::string_view name) -> std::optional<typename Map::mapped_type> {
  auto it = map.find(std::string(name));
  if (it == map.end()) return std::nullopt;
  return it->second;
}

void check_atoms(const Ontology& ontology, const InferenceRule& rule,
                 const std::vector<RelationAtom>& atoms, const char* section) {
  for (const auto& atom : atoms) {
    if (!ontology.find_relation(atom.relation)) {
      throw Error(ErrorCode::UnknownRelationInRule,
                  "rule '" + rule.name + "' " + section + " uses relation '" + atom.relation + "'");
    }
    for (const auto* param : {&atom.from, &atom.to}) {
      if (std::find(rule.parameters.begin(), rule.parameters.end(), *param) ==
          rule.parameters.end()) {
        throw Error(ErrorCode::UndeclaredRuleParameter,
                    "rule '" + rule.name + "' " + section + " mentions '" + *param + "'");
      }
    }
  }
}

}  // namespace

std::vector<InferenceRule> property_rules(const RelationDef& relation) {
  std::vector<InferenceRule> out;
  const auto& r = relation.name;
  if (relation.symmetric) {
    out.push_back(InferenceRule{r + ".symmetric", {"X", "Y"}, {{r, "X", "Y"}}, {{r, "Y", "X"}}});
  }
  if (relation.transitive) {
    out.push_back(InferenceRule{
        r + ".transitive", {"X", "Y", "Z"}, {{r, "X", "Y"}, {r, "Y", "Z"}}, {{r, "X", "Z"}}});
  }
  return out;
}

void validate_rule(const Ontology& ontology, const InferenceRule& rule) {
  std::unordered_set<std::string> seen;
  for (const auto& p : rule.parameters) {
    if (!seen.insert(p).second) {
      throw Error(ErrorCode::DuplicateName, "rule '" + rule.name + "' repeats parameter '" + p + "'");
    }
  }
  if (rule.effects.empty()) {
    throw Error(ErrorCode::EmptyRuleEffects, "rule '" + rule.name + "' has no effects");
  }
  check_atoms(ontology, rule, rule.preconditions, "precondition");
  check_atoms(ontology, rule, rule.effects, "effect");
}

Ontology Ontology::build(std::vector<std::string> concepts, std::vector<SubtypeEdge> subtype_edges,
                         std::vector<RelationDef> relations, std::vector<InferenceRule> rules) {
  Ontology o;
  o.concepts_ = std::move(concepts);
  o.subtype_edges_ = std::move(subtype_edges);
  o.relations_ = std::move(relations);
  o.rules_ = std::move(rules);

  for (ConceptIdx i = 0; i < o.concepts_.size(); ++i) {
    if (o.concepts_[i].empty()) throw Error(ErrorCode::UnknownConcept, "empty concept name");
    if (!o.concept_ids_.emplace(o.concepts_[i], i).second) {
      throw Error(ErrorCode::DuplicateName, "concept '" + o.concepts_[i] + "' declared twice");
    }
  }
  for (RelationIdx i = 0; i < o.relations_.size(); ++i) {
    if (!o.relation_ids_.emplace(o.relations_[i].name, i).second) {
      throw Error(ErrorCode::DuplicateName, "relation '" + o.relations_[i].name + "' declared twice");
    }
  }

  const std::size_t n = o.concepts_.size();
  std::vector<std::vector<ConceptIdx>> parents(n);
  std::vector<std::size_t> indegree(n, 0);  // number of declared subtypes
  for (const auto& e : o.subtype_edges_) {
    auto sub = o.find_concept(e.sub);
    auto super = o.find_concept(e.super);
    if (!sub) throw Error(ErrorCode::UnknownConcept, "subtype edge endpoint '" + e.sub + "'");
    if (!super) throw Error(ErrorCode::UnknownConcept, "subtype edge endpoint '" + e.super + "'");
    if (*sub == *super) {
      throw Error(ErrorCode::CycleInSubtypeGraph, "self-loop on '" + e.sub + "'");
    }
    parents[*sub].push_back(*super);
    ++indegree[*super];
  }

  // Kahn from the most specific concepts upward; a leftover node means a cycle.
  std::vector<ConceptIdx> order;
  order.reserve(n);
  for (ConceptIdx i = 0; i < n; ++i) {
    if (indegree[i] == 0) order.push_back(i);
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (ConceptIdx p : parents[order[head]]) {
      if (--indegree[p] == 0) order.push_back(p);
    }
  }
  if (order.size() != n) {
    for (ConceptIdx i = 0; i < n; ++i) {
      if (indegree[i] != 0) {
        throw Error(ErrorCode::CycleInSubtypeGraph, "cycle through '" + o.concepts_[i] + "'");
      }
    }
  }

  const std::size_t words = (n + 63) / 64;
  o.closure_.assign(n, std::vector<std::uint64_t>(words, 0));
  // Supertypes are processed before their subtypes when walking `order` backwards.
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto& row = o.closure_[*it];
    row[*it / 64] |= std::uint64_t{1} << (*it % 64);
    for (ConceptIdx p : parents[*it]) {
      for (std::size_t w = 0; w < words; ++w) row[w] |= o.closure_[p][w];
    }
  }
  o.supertypes_.assign(n, {});
  o.subtypes_.assign(n, {});
  for (ConceptIdx a = 0; a < n; ++a) {
    for (ConceptIdx b = 0; b < n; ++b) {
      if (o.is_subtype(a, b)) {
        o.supertypes_[a].push_back(b);
        o.subtypes_[b].push_back(a);
      }
    }
  }

  std::unordered_set<std::string> rule_names;
  for (const auto& rule : o.rules_) {
    validate_rule(o, rule);
    if (!rule_names.insert(rule.name).second) {
      throw Error(ErrorCode::DuplicateName, "rule '" + rule.name + "' declared twice");
    }
  }
  o.effective_rules_ = o.rules_;
  for (const auto& rel : o.relations_) {
    for (auto& rule : property_rules(rel)) {
      if (!rule_names.insert(rule.name).second) {
        throw Error(ErrorCode::DuplicateName,
                    "rule '" + rule.name + "' collides with a relation property rule");
      }
      o.effective_rules_.push_back(std::move(rule));
    }
  }
  return o;
}

std::optional<ConceptIdx> Ontology::find_concept(std::string_view name) const {
  return lookup(concept_ids_, name);
}

ConceptIdx Ontology::concept_index(std::string_view name) const {
  if (auto idx = find_concept(name)) return *idx;
  throw Error(ErrorCode::UnknownConcept, "concept '" + std::string(name) + "'");
}

std::optional<RelationIdx> Ontology::find_relation(std::string_view name) const {
  return lookup(relation_ids_, name);
}

RelationIdx Ontology::relation_index(std::string_view name) const {
  if (auto idx = find_relation(name)) return *idx;
  throw Error(ErrorCode::UnknownRelation, "relation '" + std::string(name) + "'");
}

bool Ontology::is_subtype(std::string_view sub, std::string_view super) const {
  return is_subtype(concept_index(sub), concept_index(super));
}

std::vector<std::pair<std::string, std::string>> Ontology::closure_pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (ConceptIdx a = 0; a < concepts_.size(); ++a) {
    for (ConceptIdx b : supertypes_[a]) out.emplace_back(concepts_[a], concepts_[b]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace wsc
