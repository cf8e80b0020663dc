#pragma once

#include <wsc/instance_io.hpp>
#include <wsc/knowledge.hpp>

#include <fstream>
#include <random>
#include <sstream>

namespace wsc::bench {

inline CompositionProblem travel() {
  std::ifstream in(WSC_FIXTURE_DIR "/travel.json");
  std::stringstream text;
  text << in.rdbuf();
  return parse_instance(text.str());
}

// Random typed objects with random labelled edges, shaped by `ontology`.
inline KnowledgeState random_state(const Ontology& ontology, std::size_t objects, std::size_t edges,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  KnowledgeState state;
  for (std::size_t i = 0; i < objects; ++i)
    state.add_object(static_cast<ConceptIdx>(rng() % ontology.concept_count()), {});
  const auto relations = ontology.relations().size();
  for (std::size_t i = 0; i < edges; ++i) {
    const ObjectId a{static_cast<std::uint32_t>(rng() % objects)};
    const ObjectId b{static_cast<std::uint32_t>(rng() % objects)};
    state.add_edge({static_cast<RelationIdx>(rng() % relations), a, b});
  }
  return state;
}

}  // namespace wsc::bench
