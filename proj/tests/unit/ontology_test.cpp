#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "wsc/error.hpp"
#include "wsc/ontology.hpp"

using namespace wsc;

namespace {

ErrorCode build_error(std::vector<std::string> concepts, std::vector<SubtypeEdge> edges,
                      std::vector<RelationDef> relations = {}, std::vector<InferenceRule> rules = {}) {
  try {
    Ontology::build(std::move(concepts), std::move(edges), std::move(relations), std::move(rules));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::SyntaxError;
}

InferenceRule destination_rule() {
  return {"getDestinationCityRule",
          {"person", "univ", "city"},
          {{"hasDest", "person", "univ"}, {"isLocatedIn", "univ", "city"}},
          {{"hasDest", "person", "city"}}};
}

// Random DAG: edges only go from a lower to a higher position in a shuffled order.
struct RandomDag {
  std::vector<std::string> concepts;
  std::vector<SubtypeEdge> edges;
};

RandomDag random_dag(std::mt19937_64& rng) {
  RandomDag d;
  const std::size_t n = 1 + rng() % 12;
  for (std::size_t i = 0; i < n; ++i) d.concepts.push_back("c" + std::to_string(i));
  auto order = d.concepts;
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng() % 4 == 0) d.edges.push_back({order[i], order[j]});
    }
  }
  return d;
}

}  // namespace

TEST_CASE("travel ontology builds") {
  const auto o = Ontology::build({"person", "univ", "city"}, {},
                                 {{"hasDest", false, false}, {"isLocatedIn", false, false}},
                                 {destination_rule()});
  CHECK(o.concept_count() == 3);
  CHECK(o.rules().size() == 1);
  CHECK(o.effective_rules().size() == 1);
  CHECK(o.is_subtype("univ", "univ"));
  CHECK_FALSE(o.is_subtype("univ", "city"));
}

TEST_CASE("declared self-loop and cycles are rejected") {
  CHECK(build_error({"A"}, {{"A", "A"}}) == ErrorCode::CycleInSubtypeGraph);
  CHECK(build_error({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}, {"C", "A"}}) == ErrorCode::CycleInSubtypeGraph);
}

TEST_CASE("validation errors") {
  CHECK(build_error({"A"}, {{"A", "B"}}) == ErrorCode::UnknownConcept);
  CHECK(build_error({"A", "A"}, {}) == ErrorCode::DuplicateName);
  CHECK(build_error({"A"}, {}, {{"r", false, false}, {"r", true, false}}) == ErrorCode::DuplicateName);
  CHECK(build_error({"A"}, {}, {{"r", false, false}}, {{"x", {"X"}, {}, {{"s", "X", "X"}}}}) ==
        ErrorCode::UnknownRelationInRule);
  CHECK(build_error({"A"}, {}, {{"r", false, false}}, {{"x", {"X"}, {}, {{"r", "X", "Y"}}}}) ==
        ErrorCode::UndeclaredRuleParameter);
  CHECK(build_error({"A"}, {}, {{"r", false, false}}, {{"x", {"X"}, {{"r", "X", "X"}}, {}}}) ==
        ErrorCode::EmptyRuleEffects);
  CHECK(build_error({"A"}, {}, {{"r", false, false}},
                    {{"x", {"X"}, {}, {{"r", "X", "X"}}}, {"x", {"X"}, {}, {{"r", "X", "X"}}}}) ==
        ErrorCode::DuplicateName);
}

TEST_CASE("closure is reflexive and transitive") {
  const auto o = Ontology::build({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}}, {}, {});
  const auto pairs = o.closure_pairs();
  const std::set<std::pair<std::string, std::string>> got(pairs.begin(), pairs.end());
  const std::set<std::pair<std::string, std::string>> want{{"A", "A"}, {"A", "B"}, {"A", "C"},
                                                           {"B", "B"}, {"B", "C"}, {"C", "C"}};
  CHECK(got == want);
  CHECK(o.is_subtype("A", "C"));
  CHECK_FALSE(o.is_subtype("C", "A"));
  CHECK_THROWS_AS(o.is_subtype("A", "Z"), Error);
}

TEST_CASE("is_subtype equals DFS reachability on random DAGs") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    const auto d = random_dag(rng);
    const auto o = Ontology::build(d.concepts, d.edges, {}, {});
    for (const auto& a : d.concepts) {
      for (const auto& b : d.concepts) {
        REQUIRE(o.is_subtype(a, b) == testing::reachable_subtype(o, a, b));
        for (const auto& c : d.concepts) {
          if (o.is_subtype(a, b) && o.is_subtype(b, c)) REQUIRE(o.is_subtype(a, c));
        }
      }
    }
  }
}

TEST_CASE("closure is idempotent") {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 50; ++round) {
    const auto d = random_dag(rng);
    const auto o = Ontology::build(d.concepts, d.edges, {}, {});
    std::vector<SubtypeEdge> closed;
    for (const auto& [sub, super] : o.closure_pairs()) {
      if (sub != super) closed.push_back({sub, super});
    }
    const auto again = Ontology::build(d.concepts, closed, {}, {});
    CHECK(again.closure_pairs() == o.closure_pairs());
  }
}

TEST_CASE("validation is declaration-order independent") {
  std::mt19937_64 rng(13);
  for (int round = 0; round < 50; ++round) {
    auto d = random_dag(rng);
    std::vector<RelationDef> rels{{"r", true, false}, {"s", false, true}, {"t", false, false}};
    std::vector<InferenceRule> rules{{"rs", {"X", "Y"}, {{"r", "X", "Y"}}, {{"s", "X", "Y"}}},
                                     {"st", {"X", "Y"}, {{"s", "X", "Y"}}, {{"t", "Y", "X"}}}};
    const auto a = Ontology::build(d.concepts, d.edges, rels, rules);
    std::shuffle(d.concepts.begin(), d.concepts.end(), rng);
    std::shuffle(d.edges.begin(), d.edges.end(), rng);
    std::shuffle(rels.begin(), rels.end(), rng);
    std::shuffle(rules.begin(), rules.end(), rng);
    const auto b = Ontology::build(d.concepts, d.edges, rels, rules);
    CHECK(a.closure_pairs() == b.closure_pairs());
    auto names = [](const Ontology& o) {
      std::set<std::string> out;
      for (const auto& r : o.effective_rules()) out.insert(r.name);
      return out;
    };
    CHECK(names(a) == names(b));
  }
}

TEST_CASE("property rules") {
  const auto sym = property_rules({"equals", false, true});
  REQUIRE(sym.size() == 1);
  CHECK(sym[0].parameters == std::vector<std::string>{"X", "Y"});
  CHECK(sym[0].preconditions == std::vector<RelationAtom>{{"equals", "X", "Y"}});
  CHECK(sym[0].effects == std::vector<RelationAtom>{{"equals", "Y", "X"}});

  CHECK(property_rules({"r", false, false}).empty());

  const auto both = property_rules({"r", true, true});
  REQUIRE(both.size() == 2);
  const auto trans = std::find_if(both.begin(), both.end(), [](const auto& r) { return r.parameters.size() == 3; });
  REQUIRE(trans != both.end());
  CHECK(trans->preconditions.size() == 2);

  const auto o = Ontology::build({"A"}, {}, {{"r", true, true}}, {});
  CHECK(o.effective_rules().size() == 2);
  for (const auto& rule : both) CHECK_NOTHROW(validate_rule(o, rule));
}
