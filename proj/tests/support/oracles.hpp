#pragma once

// Independent reference implementations used by unit and acceptance tests.
// None of them call into the matcher, similarity or composer internals.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wsc/composer.hpp"
#include "wsc/knowledge.hpp"
#include "wsc/matcher.hpp"
#include "wsc/ontology.hpp"

namespace wsc::testing {

/// Depth-first reachability over the declared subtype edges.
bool reachable_subtype(const Ontology& onto, const std::string& sub, const std::string& super);

/// Tries every map from query nodes to data nodes and keeps those meeting
/// labels, pins, edges and (optionally) injectivity. Sorted.
std::vector<Binding> all_mappings_filter(const QueryGraph& query, const DataGraph& data, bool injective);

/// Enumerates every bijection between the weak components of `a` and `b`
/// and checks for one that maps a to b with concepts and directed labelled
/// edges preserved exactly.
bool exhaustive_similar(const KnowledgeState& state, ObjectId a, ObjectId b);

/// Set-level fixpoint for instances without relations or rules: the known
/// concept set grows by a service's outputs once each input concept has a
/// known subtype. The request is answered when every wanted concept has a
/// known subtype.
bool set_fixpoint_solvable(const CompositionProblem& problem);

/// The same problem with every inference rule and property rule removed.
CompositionProblem without_rules(const CompositionProblem& problem);

// Random instance builders shared by the property suites.

struct RandomGraphCase {
  Ontology ontology;
  KnowledgeState state;
  Service service;
};

/// Query of up to `max_query` inputs over a state of up to `max_data`
/// objects, with at most `relations` relation names.
RandomGraphCase random_match_case(std::mt19937_64& rng, std::size_t max_query, std::size_t max_data,
                                  std::size_t relations, bool force_split = false);

/// A state whose objects fall into a few small components, for similarity.
struct RandomSimilarityCase {
  Ontology ontology;
  KnowledgeState state;
  ObjectId a;
  ObjectId b;
};
RandomSimilarityCase random_similarity_case(std::mt19937_64& rng, std::size_t max_nodes);

/// Flat or hierarchical taxonomy, no relations, no rules.
CompositionProblem random_degenerate_problem(std::mt19937_64& rng, bool hierarchical);

}  // namespace wsc::testing
