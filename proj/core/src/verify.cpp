#include "wsc/verify.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>

#include "wsc/error.hpp"
#include "wsc/matcher.hpp"

namespace wsc {

namespace {

VerifyResult invalid(std::size_t step, std::string reason) { return {false, step, std::move(reason)}; }

void saturate(const Ontology& onto, KnowledgeState& state, const std::vector<Service>& rules,
              const std::vector<QueryGraph>& queries, bool injective) {
  MatchConfig cfg;
  cfg.injective = injective;
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t r = 0; r < rules.size(); ++r) {
      const auto data = DataGraph::build(onto, state);
      for (const auto& b : split_and_match(queries[r], data, cfg)) {
        if (!apply_call_effects(onto, state, rules[r], b, 0).new_edges.empty()) grew = true;
      }
    }
  }
}

// Names the first failed condition of a binding, for diagnostics.
std::string explain(const Ontology& onto, const Service& service, const QueryGraph& query,
                    const DataGraph& data, const Binding& binding, bool injective) {
  for (std::size_t i = 0; i < query.nodes.size(); ++i) {
    auto node = data.node_of(binding[i]);
    const auto& q = query.nodes[i];
    if (q.kind == QueryNode::Kind::Concept && !data.has_label(*node, q.type)) {
      return "input '" + q.param + "' bound to a " + onto.concept_name(data.type(*node)) +
             ", which is not a " + onto.concept_name(q.type);
    }
    if (q.kind == QueryNode::Kind::Pinned && data.object(*node) != q.pinned) {
      return "input '" + q.param + "' must be the request's own object";
    }
  }
  for (const auto& atom : service.preconditions) {
    auto from = data.node_of(binding[*service.input_index(atom.from)]);
    auto to = data.node_of(binding[*service.input_index(atom.to)]);
    if (!data.has_edge(onto.relation_index(atom.relation), *from, *to)) {
      return "precondition unmatched: " + atom.relation + "(" + atom.from + "," + atom.to + ")";
    }
  }
  if (injective) return "binding is not injective";
  return "binding rejected";
}

}  // namespace

VerifyResult verify_plan(const CompositionProblem& problem, const CompositionPlan& plan) {
  return verify_plan(problem, plan, VerifyOptions{false, !plan.rule_calls_included});
}

VerifyResult verify_plan(const CompositionProblem& problem, const CompositionPlan& plan,
                         const VerifyOptions& options) {
  const Ontology& onto = problem.ontology;
  InitialKnowledge init = init_from_request(onto, problem.request);
  KnowledgeState& state = init.state;

  // plan id -> replay id
  std::unordered_map<std::uint32_t, ObjectId> remap;
  bool request_listed = false;
  for (const auto& o : plan.objects) {
    if (o.provenance.kind != Provenance::Kind::FromRequest) continue;
    request_listed = true;
    for (std::size_t i = 0; i < problem.request.provided.size(); ++i) {
      if (problem.request.provided[i].name == o.provenance.param) remap[o.id.value] = init.provided[i];
    }
  }
  if (!request_listed) {
    for (ObjectId id : init.provided) remap[id.value] = id;
  }

  std::vector<Service> rules;
  std::vector<QueryGraph> rule_queries;
  if (options.saturate_rules) {
    rules = rule_services(onto);
    for (const auto& r : rules) rule_queries.push_back(build_query_graph(onto, r));
  }

  auto resolve = [&](const NamedBinding& named, const Service& service, std::size_t step,
                     Binding& out) -> std::optional<VerifyResult> {
    out.clear();
    for (const auto& input : service.inputs) {
      auto it = std::find_if(named.begin(), named.end(),
                             [&](const auto& p) { return p.first == input.name; });
      if (it == named.end()) return invalid(step, "input '" + input.name + "' is unbound");
      auto m = remap.find(it->second.value);
      if (m == remap.end()) {
        return invalid(step, "input '" + input.name + "' refers to object #" +
                                 std::to_string(it->second.value) + ", which does not exist yet");
      }
      out.push_back(m->second);
    }
    if (named.size() != service.inputs.size()) return invalid(step, "binding names unknown inputs");
    return std::nullopt;
  };

  for (std::size_t i = 0; i < plan.calls.size(); ++i) {
    const std::size_t step = i + 1;
    const auto& call = plan.calls[i];
    auto service = find_step_service(problem, call.service, call.is_virtual);
    if (!service) return invalid(step, "unknown service '" + call.service + "'");
    if (options.saturate_rules) saturate(onto, state, rules, rule_queries, options.injective);

    Binding binding;
    if (auto bad = resolve(call.binding, *service, step, binding)) return *bad;
    const QueryGraph query = build_query_graph(onto, *service);
    const DataGraph data = DataGraph::build(onto, state);
    if (!binding_satisfies(query, data, binding, options.injective)) {
      return invalid(step, explain(onto, *service, query, data, binding, options.injective));
    }
    auto effects = apply_call_effects(onto, state, *service, binding, i);
    if (call.produced.size() != effects.produced.size()) {
      return invalid(step, "recorded outputs do not match the service's outputs");
    }
    for (const auto& [param, fresh] : effects.produced) {
      auto it = std::find_if(call.produced.begin(), call.produced.end(),
                             [&](const auto& p) { return p.first == param; });
      if (it == call.produced.end()) return invalid(step, "output '" + param + "' not recorded");
      if (remap.contains(it->second.value)) {
        return invalid(step, "output '" + param + "' reuses object id #" + std::to_string(it->second.value));
      }
      remap[it->second.value] = fresh;
    }
  }

  const std::size_t goal_step = plan.calls.size() + 1;
  if (options.saturate_rules) saturate(onto, state, rules, rule_queries, options.injective);
  const GoalService goal = request_as_goal_service(problem.request);
  Pins pins;
  for (const auto& name : goal.pinned) {
    for (std::size_t k = 0; k < problem.request.provided.size(); ++k) {
      if (problem.request.provided[k].name == name) pins.emplace_back(name, init.provided[k]);
    }
  }
  Binding binding;
  if (auto bad = resolve(plan.goal_binding, goal.service, goal_step, binding)) {
    bad->reason = "goal: " + bad->reason;
    return *bad;
  }
  const QueryGraph query = build_query_graph(onto, goal.service, pins);
  const DataGraph data = DataGraph::build(onto, state);
  if (!binding_satisfies(query, data, binding, options.injective)) {
    return invalid(goal_step, "goal: " + explain(onto, goal.service, query, data, binding, options.injective));
  }
  return {};
}

}  // namespace wsc
