#include <random>
#include <string>
#include <variant>

#include "doctest.h"
#include "oracles.hpp"
#include "wsc/composer.hpp"
#include "wsc/error.hpp"
#include "wsc/generator.hpp"
#include "wsc/instance_io.hpp"
#include "wsc/verify.hpp"

using namespace wsc;

namespace {

CompositionProblem travel() {
  return parse_instance(read_file(std::string(WSC_FIXTURE_DIR) + "/travel.json"));
}

CompositionPlan plan_of(const ComposeResult& r) {
  REQUIRE(std::holds_alternative<CompositionPlan>(r));
  return std::get<CompositionPlan>(r);
}

// The travel problem plus a souvenir shop nobody needs.
CompositionProblem travel_with_decoy() {
  const auto base = travel();
  const auto& o = base.ontology;
  std::vector<std::string> concepts = o.concepts();
  concepts.push_back("souvenir");
  CompositionProblem p{Ontology::build(concepts, o.subtype_edges(), o.relations(), o.rules()), base.repository,
                       base.request};
  Service decoy;
  decoy.name = "buySouvenir";
  decoy.inputs = {{"person", "person"}};
  decoy.outputs = {{"gift", "souvenir"}};
  p.repository.services.insert(p.repository.services.begin(), decoy);
  validate_problem(p);
  return p;
}

}  // namespace

TEST_CASE("travel composes in the expected order") {
  const auto p = travel();
  const auto plan = plan_of(compose(p));
  REQUIRE(plan.calls.size() == 3);
  CHECK(plan.calls[0].service == "getUnivLocation");
  CHECK(plan.calls[1].service == "getDestinationCityRule");
  CHECK(plan.calls[1].is_virtual);
  CHECK(plan.calls[2].service == "getAirplaneTicket");
  CHECK(plan.goal_binding == NamedBinding{{"ticket", {5}}});
  CHECK(verify_plan(p, plan).valid);

  ComposerConfig injective;
  injective.injective = true;
  CHECK(plan_of(compose(p, injective)).calls.size() == 3);
}

TEST_CASE("can_answer_query") {
  const auto p = travel();
  auto init = init_from_request(p.ontology, p.request);
  CHECK_FALSE(can_answer_query(p.ontology, init.state, p.request, init.provided));

  // Replay the composer's calls; burned ids are skipped so the ticket keeps its number.
  const auto plan = plan_of(compose(p));
  REQUIRE(plan.calls.size() == 3);
  const auto rules = rule_services(p.ontology);
  auto state = init.state;
  for (const auto& call : plan.calls) {
    const Service* svc = call.is_virtual ? nullptr : p.repository.find(call.service);
    for (const auto& r : rules)
      if (call.is_virtual && r.name == call.service) svc = &r;
    REQUIRE(svc);
    if (!call.produced.empty()) state.skip_ids(call.produced.front().second.value - state.next_id());
    Binding b;
    for (const auto& [param, obj] : call.binding) b.push_back(obj);
    apply_call_effects(p.ontology, state, *svc, b, call.index);
  }
  const auto found = can_answer_query(p.ontology, state, p.request, init.provided);
  REQUIRE(found);
  CHECK(*found == Binding{{5}});

  Request empty;
  empty.name = "q";
  const auto none = can_answer_query(p.ontology, KnowledgeState{}, empty, {});
  REQUIRE(none);
  CHECK(none->empty());
}

TEST_CASE("a request already answered needs no calls") {
  auto p = travel();
  p.request.wanted = {{"city", "city"}};
  const auto plan = plan_of(compose(p));
  CHECK(plan.calls.empty());
  CHECK(brute_force_compose(p, 6).solvable);
  CHECK(brute_force_compose(p, 6).depth == 0);

}

TEST_CASE("no producer means NoProgress after one sweep") {
  // Nothing in the repository can fire, and nothing makes souvenirs.
  auto p = travel_with_decoy();
  p.repository.services.clear();
  p.request.wanted = {{"gift", "souvenir"}};
  const auto r = compose(p);
  REQUIRE(std::holds_alternative<NotSolved>(r));
  const auto stop = std::get<NotSolved>(r);
  CHECK(stop.reason == NotSolvedReason::NoProgress);
  CHECK(stop.iterations == 1);
  CHECK_FALSE(brute_force_compose(p, 6).solvable);
}

TEST_CASE("usefulness filter") {
  const auto p = travel();
  const auto& univ_location = *p.repository.find("getUnivLocation");
  auto state = init_from_request(p.ontology, p.request).state;
  CHECK(provides_useful_information(p.ontology, state, univ_location, {{2}}));
  apply_call_effects(p.ontology, state, univ_location, {{2}}, 0);
  CHECK_FALSE(provides_useful_information(p.ontology, state, univ_location, {{2}}));

  const auto rule = rule_as_virtual_service(p.ontology.rules()[0]);
  CHECK(provides_useful_information(p.ontology, state, rule, {{0}, {2}, {3}}));
  apply_call_effects(p.ontology, state, rule, {{0}, {2}, {3}}, 1);
  CHECK_FALSE(provides_useful_information(p.ontology, state, rule, {{0}, {2}, {3}}));

  // First ticket anywhere is useful.
  CHECK(provides_useful_information(p.ontology, state, *p.repository.find("getAirplaneTicket"), {{0}, {1}, {3}}));
}

TEST_CASE("plans without rule calls verify with saturation") {
  const auto p = travel();
  ComposerConfig cfg;
  cfg.include_rule_calls = false;
  const auto plan = plan_of(compose(p, cfg));
  CHECK(plan.calls.size() == 2);
  CHECK_FALSE(plan.rule_calls_included);
  VerifyOptions saturate;
  saturate.saturate_rules = true;
  CHECK(verify_plan(p, plan, saturate).valid);
  CHECK(verify_plan(p, plan).valid);  // follows the plan's own flag
  CHECK_FALSE(verify_plan(p, plan, VerifyOptions{}).valid);
  CHECK_THROWS_AS(prune_plan(plan, p), Error);
}

TEST_CASE("verify catches swapped steps and missing goals") {
  const auto p = travel();
  auto plan = plan_of(compose(p));
  std::swap(plan.calls[0], plan.calls[2]);
  const auto r = verify_plan(p, plan);
  CHECK_FALSE(r.valid);
  CHECK(r.step == 1);
  CHECK_FALSE(r.reason.empty());

  auto short_plan = plan_of(compose(p));
  short_plan.calls.pop_back();
  const auto goal = verify_plan(p, short_plan);
  CHECK_FALSE(goal.valid);
  CHECK(goal.step == 3);

  auto trivial = travel();
  trivial.request.wanted = {};
  CHECK(verify_plan(trivial, CompositionPlan{}).valid);
}

TEST_CASE("prune_plan drops a decoy call") {
  const auto p = travel_with_decoy();
  const auto plan = plan_of(compose(p));
  REQUIRE(plan.calls.size() == 4);
  CHECK(plan.calls[0].service == "buySouvenir");
  const auto small = prune_plan(plan, p);
  REQUIRE(small.calls.size() == 3);
  for (const auto& c : small.calls) CHECK(c.service != "buySouvenir");
  CHECK(verify_plan(p, small).valid);

  const auto t = travel();
  const auto minimal = plan_of(compose(t));
  const auto same = prune_plan(minimal, t);
  REQUIRE(same.calls.size() == minimal.calls.size());
  for (std::size_t i = 0; i < same.calls.size(); ++i) CHECK(same.calls[i].service == minimal.calls[i].service);
  CHECK(verify_plan(t, same).valid);

  auto trivial = travel();
  trivial.request.wanted = {};
  const auto empty = plan_of(compose(trivial));
  CHECK(prune_plan(empty, trivial).calls.empty());
}

TEST_CASE("brute force oracle") {
  const auto p = travel();
  const auto r = brute_force_compose(p, 6);
  CHECK(r.solvable);
  CHECK(r.depth == 3);

  GeneratorParams g;
  g.services = 9;
  CHECK_THROWS_AS(brute_force_compose(generate_instance(g), 3), Error);
  CHECK_THROWS_AS(brute_force_compose(p, 7), Error);
}

TEST_CASE("a fresh-object chain hits the sweep bound") {
  CompositionProblem p{Ontology::build({"node", "never"}, {}, {{"next", false, false}}, {}), {}, {}};
  Service grow;
  grow.name = "grow";
  grow.inputs = {{"x", "node"}};
  grow.outputs = {{"y", "node"}};
  grow.effects = {{"next", "x", "y"}};
  p.repository.services = {grow};
  p.request.name = "q";
  p.request.provided = {{"seed", "node"}};
  p.request.wanted = {{"w", "never"}};
  validate_problem(p);

  ComposerConfig cfg;
  cfg.max_iterations = 20;
  const auto r = compose(p, cfg);
  REQUIRE(std::holds_alternative<NotSolved>(r));
  CHECK(std::get<NotSolved>(r).reason == NotSolvedReason::IterationBound);
  CHECK(std::get<NotSolved>(r).iterations == 20);

  cfg.max_objects = 10;
  const auto o = compose(p, cfg);
  REQUIRE(std::holds_alternative<NotSolved>(o));
  CHECK(std::get<NotSolved>(o).reason == NotSolvedReason::ObjectBound);

  cfg.max_iterations = 0;
  CHECK_THROWS_AS(compose(p, cfg), Error);
  cfg.max_iterations = 5;
  cfg.max_objects = 0;
  CHECK_THROWS_AS(compose(p, cfg), Error);
}

TEST_CASE("compose is deterministic and agrees with the oracle on small instances") {
  std::mt19937_64 rng(99);
  ComposerConfig cfg;
  cfg.max_objects = 500;
  for (int round = 0; round < 40; ++round) {
    GeneratorParams g;
    g.depth = 3 + rng() % 2;
    g.services = g.depth + rng() % 3;
    g.concepts = g.depth + 3;
    g.subtype_edges = rng() % 3;
    g.solvable = rng() % 2 == 0;
    g.seed = rng();
    const auto p = generate_instance(g);
    const auto a = compose(p, cfg);
    const auto b = compose(p, cfg);
    CHECK(a.index() == b.index());
    if (const auto* plan = std::get_if<CompositionPlan>(&a)) {
      CHECK(*plan == std::get<CompositionPlan>(b));
      CHECK(verify_plan(p, *plan).valid);
    }
    CHECK(std::holds_alternative<CompositionPlan>(a) == brute_force_compose(p, 6).solvable);
  }
}
