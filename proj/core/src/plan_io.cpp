#include "wsc/plan_io.hpp"

#include <algorithm>

#include <json.hpp>

#include "wsc/error.hpp"

namespace wsc {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "wsc-plan/1";

json binding_json(const NamedBinding& b) {
  json j = json::object();
  for (const auto& [param, id] : b) j[param] = id.value;
  return j;
}

json config_json(const ComposerConfig& c) {
  return {{"maxIterations", c.max_iterations},
          {"maxObjects", c.max_objects},
          {"injective", c.injective},
          {"matcherPruning", c.matcher_pruning},
          {"includeRuleCalls", c.include_rule_calls}};
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::SyntaxError, "plan: " + what); }

NamedBinding parse_binding(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
  NamedBinding out;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number_unsigned()) bad(where + "/" + key + " must be an object id");
    out.emplace_back(key, ObjectId{value.get<std::uint32_t>()});
  }
  return out;
}

}  // namespace

std::string serialize_plan(const Ontology& ontology, const CompositionPlan& plan,
                           const ComposerConfig& config) {
  json calls = json::array();
  for (const auto& c : plan.calls) {
    json edges = json::array();
    auto sorted = c.added_edges;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& e : sorted) {
      edges.push_back({{"relation", ontology.relation(e.relation).name},
                       {"from", e.src.value},
                       {"to", e.dst.value}});
    }
    calls.push_back({{"index", c.index},
                     {"service", c.service},
                     {"virtual", c.is_virtual},
                     {"binding", binding_json(c.binding)},
                     {"produced", binding_json(c.produced)},
                     {"addedEdges", edges}});
  }
  auto objects_sorted = plan.objects;
  std::sort(objects_sorted.begin(), objects_sorted.end(),
            [](const ObjectInstance& a, const ObjectInstance& b) { return a.id < b.id; });
  json objects = json::array();
  for (const auto& o : objects_sorted) {
    json j = {{"id", o.id.value}, {"concept", ontology.concept_name(o.type)}, {"param", o.provenance.param}};
    if (o.provenance.kind == Provenance::Kind::FromRequest) {
      j["source"] = "request";
    } else {
      j["source"] = "call";
      j["call"] = o.provenance.call_index;
    }
    objects.push_back(std::move(j));
  }
  json doc = {{"format", kFormat},
              {"status", "solved"},
              {"calls", calls},
              {"goalBinding", binding_json(plan.goal_binding)},
              {"objects", objects},
              {"ruleCallsIncluded", plan.rule_calls_included},
              {"solver", {{"iterations", plan.iterations}, {"config", config_json(config)}}}};
  return doc.dump(2) + "\n";
}

std::string serialize_not_solved(const NotSolved& result, const ComposerConfig& config) {
  json doc = {{"format", kFormat},
              {"status", "not-solved"},
              {"reason", std::string(to_string(result.reason))},
              {"solver",
               {{"iterations", result.iterations},
                {"objects", result.objects},
                {"config", config_json(config)}}}};
  return doc.dump(2) + "\n";
}

CompositionPlan parse_plan(std::string_view text, const Ontology& ontology) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    bad(e.what());
  }
  if (!doc.is_object()) bad("document must be an object");
  if (doc.value("status", std::string("solved")) != "solved") bad("document does not hold a solved plan");
  CompositionPlan plan;
  try {
    plan.rule_calls_included = doc.value("ruleCallsIncluded", true);
    if (doc.contains("solver")) plan.iterations = doc["solver"].value("iterations", std::size_t{0});
    const auto& calls = doc.at("calls");
    if (!calls.is_array()) bad("calls must be an array");
    for (std::size_t i = 0; i < calls.size(); ++i) {
      const auto& c = calls[i];
      const std::string where = "/calls/" + std::to_string(i);
      ServiceCall call;
      call.index = c.value("index", i);
      call.service = c.at("service").get<std::string>();
      call.is_virtual = c.value("virtual", false);
      call.binding = parse_binding(c.at("binding"), where + "/binding");
      call.produced = parse_binding(c.value("produced", json::object()), where + "/produced");
      for (const auto& e : c.value("addedEdges", json::array())) {
        auto rel = ontology.find_relation(e.at("relation").get<std::string>());
        if (!rel) bad(where + " names an undeclared relation");
        call.added_edges.push_back(RelationEdge{*rel, ObjectId{e.at("from").get<std::uint32_t>()},
                                                ObjectId{e.at("to").get<std::uint32_t>()}});
      }
      plan.calls.push_back(std::move(call));
    }
    plan.goal_binding = parse_binding(doc.at("goalBinding"), "/goalBinding");
    for (const auto& o : doc.value("objects", json::array())) {
      ObjectInstance inst;
      inst.id = ObjectId{o.at("id").get<std::uint32_t>()};
      auto type = ontology.find_concept(o.at("concept").get<std::string>());
      if (!type) bad("object #" + std::to_string(inst.id.value) + " has an undeclared concept");
      inst.type = *type;
      inst.provenance.param = o.at("param").get<std::string>();
      if (o.at("source").get<std::string>() == "request") {
        inst.provenance.kind = Provenance::Kind::FromRequest;
      } else {
        inst.provenance.kind = Provenance::Kind::FromCall;
        inst.provenance.call_index = o.at("call").get<std::size_t>();
      }
      plan.objects.push_back(std::move(inst));
    }
  } catch (const json::exception& e) {
    bad(e.what());
  }
  return plan;
}

}  // namespace wsc
