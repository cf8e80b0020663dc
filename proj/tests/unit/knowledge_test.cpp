#include <random>
#include <set>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "wsc/error.hpp"
#include "wsc/instance_io.hpp"
#include "wsc/knowledge.hpp"

using namespace wsc;

namespace {

CompositionProblem travel() {
  return parse_instance(read_file(std::string(WSC_FIXTURE_DIR) + "/travel.json"));
}

const Service& service(const CompositionProblem& p, const std::string& name) { return *p.repository.find(name); }

}  // namespace

TEST_CASE("init_from_request") {
  const auto p = travel();
  const auto init = init_from_request(p.ontology, p.request);
  CHECK(init.state.objects().size() == 3);
  CHECK(init.state.edges().size() == 2);
  CHECK(init.provided == std::vector<ObjectId>{{0}, {1}, {2}});

  Request empty;
  empty.name = "q";
  CHECK(init_from_request(p.ontology, empty).state.objects().empty());

  const auto o = Ontology::build({"A"}, {}, {{"r", false, false}}, {});
  Request pair;
  pair.name = "q";
  pair.provided = {{"a", "A"}, {"b", "A"}};
  pair.provided_relations = {{"r", "a", "b"}};
  const auto two = init_from_request(o, pair);
  REQUIRE(two.state.objects().size() == 2);
  CHECK(two.state.objects()[0].id == ObjectId{0});
  CHECK(two.state.objects()[1].id == ObjectId{1});
  CHECK(two.state.edges().size() == 1);
}

TEST_CASE("apply_call_effects") {
  const auto p = travel();
  auto state = init_from_request(p.ontology, p.request).state;
  const auto located = p.ontology.relation_index("isLocatedIn");
  const auto dest = p.ontology.relation_index("hasDest");

  const auto first = apply_call_effects(p.ontology, state, service(p, "getUnivLocation"), {{2}}, 0);
  REQUIRE(first.produced.size() == 1);
  CHECK(first.produced[0].second == ObjectId{3});
  CHECK(state.object({3}).type == p.ontology.concept_index("city"));
  CHECK(first.new_edges == std::vector<RelationEdge>{{located, {2}, {3}}});

  const auto rule = rule_as_virtual_service(p.ontology.rules()[0]);
  const auto second = apply_call_effects(p.ontology, state, rule, {{0}, {2}, {3}}, 1);
  CHECK(second.produced.empty());
  CHECK(second.new_edges == std::vector<RelationEdge>{{dest, {0}, {3}}});

  const auto again = apply_call_effects(p.ontology, state, rule, {{0}, {2}, {3}}, 2);
  CHECK(again.new_edges.empty());

  CHECK_THROWS_AS(apply_call_effects(p.ontology, state, rule, {{0}}, 3), Error);
  CHECK_THROWS_AS(apply_call_effects(p.ontology, state, rule, {{0}, {2}, {99}}, 3), Error);
}

TEST_CASE("connected components") {
  const auto o = Ontology::build({"A", "B"}, {}, {{"r", false, false}}, {});
  KnowledgeState state;
  const auto a = state.add_object(0, {});
  CHECK(connected_component(state, a).nodes == std::vector<ObjectId>{a});

  const auto p = travel();
  const auto init = init_from_request(p.ontology, p.request);
  const auto comp = connected_component(init.state, ObjectId{0});
  CHECK(comp.nodes.size() == 3);
  CHECK(comp.edges.size() == 2);

  const auto b = state.add_object(1, {});
  const auto c = state.add_object(0, {});
  const auto d = state.add_object(1, {});
  state.add_edge({0, a, b});
  state.add_edge({0, d, c});
  CHECK(connected_component(state, a).nodes.size() == 2);
  CHECK(connected_component(state, c).nodes.size() == 2);
  CHECK_THROWS_AS(connected_component(state, ObjectId{42}), Error);
}

TEST_CASE("components partition the state") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 100; ++round) {
    const auto c = testing::random_similarity_case(rng, 8);
    std::set<ObjectId> seen;
    std::size_t total = 0;
    for (const auto& obj : c.state.objects()) {
      const auto comp = connected_component(c.state, obj.id);
      CHECK(std::find(comp.nodes.begin(), comp.nodes.end(), obj.id) != comp.nodes.end());
      if (comp.nodes.front() == obj.id) {
        total += comp.nodes.size();
        for (auto n : comp.nodes) CHECK(seen.insert(n).second);
      }
    }
    CHECK(total == c.state.objects().size());
  }
}

TEST_CASE("objects_similar examples") {
  const auto o = Ontology::build({"person", "city"}, {}, {{"hasDest", false, false}, {"isLocatedIn", false, false}}, {});
  KnowledgeState state;
  const auto p1 = state.add_object(0, {});
  const auto c1 = state.add_object(1, {});
  const auto p2 = state.add_object(0, {});
  const auto c2 = state.add_object(1, {});
  state.add_edge({0, p1, c1});
  state.add_edge({1, p2, c2});
  CHECK(objects_similar(state, p1, p1));
  CHECK_FALSE(objects_similar(state, p1, p2));
  CHECK(testing::exhaustive_similar(state, p1, p2) == false);

  const auto lone_a = state.add_object(0, {});
  const auto lone_b = state.add_object(0, {});
  const auto lone_c = state.add_object(1, {});
  CHECK(objects_similar(state, lone_a, lone_b));
  CHECK_FALSE(objects_similar(state, lone_a, lone_c));
  CHECK_THROWS_AS(objects_similar(state, lone_a, ObjectId{77}), Error);
}

TEST_CASE("objects_similar is an equivalence matching the exhaustive oracle") {
  std::mt19937_64 rng(6);
  for (int round = 0; round < 60; ++round) {
    const auto c = testing::random_similarity_case(rng, 5);
    const auto& objs = c.state.objects();
    for (const auto& x : objs) {
      CHECK(objects_similar(c.state, x.id, x.id));
      for (const auto& y : objs) {
        const bool xy = objects_similar(c.state, x.id, y.id);
        REQUIRE(xy == testing::exhaustive_similar(c.state, x.id, y.id));
        CHECK(xy == objects_similar(c.state, y.id, x.id));
        if (xy) CHECK(refinement_hash(c.state, x.id) == refinement_hash(c.state, y.id));
        if (!xy) continue;
        for (const auto& z : objs) {
          if (objects_similar(c.state, y.id, z.id)) CHECK(objects_similar(c.state, x.id, z.id));
        }
      }
    }
  }
}

TEST_CASE("component sizes follow edges and rollback") {
  KnowledgeState state;
  const auto a = state.add_object(0, {});
  const auto b = state.add_object(0, {});
  const auto c = state.add_object(0, {});
  CHECK(state.component_size(a) == KnowledgeState::ComponentSize{1, 0});
  state.add_edge({0, a, b});
  CHECK(state.component_size(b) == KnowledgeState::ComponentSize{2, 1});

  const auto cp = state.checkpoint();
  const auto d = state.add_object(0, {});
  state.add_edge({0, b, c});
  state.add_edge({0, c, d});
  state.add_edge({0, c, c});
  CHECK(state.component_size(a) == KnowledgeState::ComponentSize{4, 4});
  CHECK_FALSE(state.add_edge({0, a, b}));

  state.rollback(cp);
  CHECK(state.component_size(a) == KnowledgeState::ComponentSize{2, 1});
  CHECK(state.component_size(c) == KnowledgeState::ComponentSize{1, 0});
  CHECK_FALSE(state.contains(d));
  CHECK_FALSE(state.has_edge({0, b, c}));

  // Ids are never handed out twice, rolled back or skipped.
  state.skip_ids(2);
  const auto e = state.add_object(0, {});
  CHECK(e.value == d.value + 3);
  CHECK(state.component_size(e) == KnowledgeState::ComponentSize{1, 0});
}

TEST_CASE("component sizes agree with a fresh traversal") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 100; ++round) {
    const auto c = testing::random_similarity_case(rng, 8);
    for (const auto& obj : c.state.objects()) {
      const auto comp = connected_component(c.state, obj.id);
      CHECK(c.state.component_size(obj.id) == KnowledgeState::ComponentSize{comp.nodes.size(), comp.edges.size()});
    }
  }
}

TEST_CASE("knowledge dump is deterministic") {
  const auto p = travel();
  const auto init = init_from_request(p.ontology, p.request);
  const auto text = dump_knowledge(p.ontology, init.state);
  CHECK(text == dump_knowledge(p.ontology, init.state));
  CHECK(text.find("objects 3") == 0);
  CHECK(text.find("hasDest") != std::string::npos);
}
