#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "wsc/composer.hpp"
#include "wsc/error.hpp"

// Independent of the matcher module: bindings are enumerated here by a plain
// depth-first walk over inputs in declaration order, straight on the
// knowledge state.

namespace wsc {

namespace {

struct Pattern {
  std::vector<std::optional<ConceptIdx>> types;  // nullopt = ANY
  std::vector<std::optional<ObjectId>> pins;
  std::vector<std::tuple<RelationIdx, std::size_t, std::size_t>> atoms;
};

Pattern make_pattern(const Ontology& onto, const Service& s) {
  Pattern p;
  for (const auto& in : s.inputs) {
    p.types.push_back(in.is_any() ? std::nullopt : std::optional(onto.concept_index(*in.type)));
    p.pins.push_back(std::nullopt);
  }
  for (const auto& a : s.preconditions) {
    p.atoms.emplace_back(onto.relation_index(a.relation), *s.input_index(a.from), *s.input_index(a.to));
  }
  return p;
}

template <typename Fn>
bool walk(const Ontology& onto, const KnowledgeState& state, const Pattern& p, Binding& partial,
          Fn&& fn) {
  const std::size_t i = partial.size();
  if (i == p.types.size()) return fn(partial);
  for (const auto& obj : state.objects()) {
    if (p.pins[i] && obj.id != *p.pins[i]) continue;
    if (p.types[i] && !onto.is_subtype(obj.type, *p.types[i])) continue;
    partial.push_back(obj.id);
    bool ok = true;
    for (const auto& [rel, from, to] : p.atoms) {
      if (std::max(from, to) != i) continue;
      if (!state.has_edge(RelationEdge{rel, partial[from], partial[to]})) {
        ok = false;
        break;
      }
    }
    if (ok && walk(onto, state, p, partial, fn)) return true;
    partial.pop_back();
  }
  return false;
}

struct Node {
  KnowledgeState state;
  std::unordered_map<std::uint32_t, std::uint32_t> canon;  // ObjectId -> canonical object
  std::vector<std::uint32_t> calls;                        // sorted canonical call ids
};

}  // namespace

BruteForceResult brute_force_compose(const CompositionProblem& problem, std::size_t max_depth,
                                     std::size_t node_budget) {
  if (problem.repository.services.size() > 8) {
    throw Error(ErrorCode::GuardExceeded, "brute force is limited to 8 services");
  }
  if (max_depth > 6) throw Error(ErrorCode::GuardExceeded, "brute force is limited to depth 6");
  const Ontology& onto = problem.ontology;

  std::vector<Service> services = problem.repository.services;
  for (auto& s : rule_services(onto)) services.push_back(std::move(s));
  std::vector<Pattern> patterns;
  for (const auto& s : services) patterns.push_back(make_pattern(onto, s));

  InitialKnowledge init = init_from_request(onto, problem.request);
  const GoalService goal = request_as_goal_service(problem.request);
  Pattern goal_pattern = make_pattern(onto, goal.service);
  for (std::size_t i = 0; i < goal.service.inputs.size(); ++i) {
    for (std::size_t k = 0; k < problem.request.provided.size(); ++k) {
      if (std::find(goal.pinned.begin(), goal.pinned.end(), goal.service.inputs[i].name) !=
              goal.pinned.end() &&
          problem.request.provided[k].name == goal.service.inputs[i].name) {
        goal_pattern.pins[i] = init.provided[k];
      }
    }
  }
  auto answered = [&](const KnowledgeState& state) {
    Binding partial;
    return walk(onto, state, goal_pattern, partial, [](const Binding&) { return true; });
  };

  // Canonical names: request objects are 0..n-1; a produced object is named
  // by (canonical call, output position); a call by (service, canonical inputs).
  std::map<std::pair<std::uint32_t, std::size_t>, std::uint32_t> object_names;
  std::map<std::pair<std::size_t, std::vector<std::uint32_t>>, std::uint32_t> call_names;
  const auto request_objects = static_cast<std::uint32_t>(init.state.objects().size());

  Node root;
  root.state = init.state;
  for (const auto& o : root.state.objects()) root.canon.emplace(o.id.value, o.id.value);
  if (answered(root.state)) return {true, 0};

  std::vector<Node> frontier;
  frontier.push_back(std::move(root));
  std::size_t explored = 0;
  for (std::size_t depth = 1; depth <= max_depth; ++depth) {
    std::vector<Node> next;
    std::set<std::vector<std::uint32_t>> seen;
    for (const auto& node : frontier) {
      for (std::size_t s = 0; s < services.size(); ++s) {
        std::vector<Binding> bindings;
        Binding partial;
        walk(onto, node.state, patterns[s], partial, [&](const Binding& b) {
          bindings.push_back(b);
          return false;
        });
        for (const auto& binding : bindings) {
          std::vector<std::uint32_t> canon_inputs;
          canon_inputs.reserve(binding.size());
          for (ObjectId id : binding) canon_inputs.push_back(node.canon.at(id.value));
          auto [it, fresh] = call_names.try_emplace({s, canon_inputs},
                                                    static_cast<std::uint32_t>(call_names.size()));
          const std::uint32_t call_id = it->second;
          if (std::binary_search(node.calls.begin(), node.calls.end(), call_id)) continue;

          std::vector<std::uint32_t> calls = node.calls;
          calls.insert(std::upper_bound(calls.begin(), calls.end(), call_id), call_id);
          if (seen.contains(calls)) continue;

          Node child{node.state, node.canon, calls};
          auto effects = apply_call_effects(onto, child.state, services[s], binding, depth - 1);
          if (effects.produced.empty() && effects.new_edges.empty()) continue;
          seen.insert(calls);
          for (std::size_t k = 0; k < effects.produced.size(); ++k) {
            auto [oit, ofresh] = object_names.try_emplace(
                {call_id, k}, request_objects + static_cast<std::uint32_t>(object_names.size()));
            child.canon.emplace(effects.produced[k].second.value, oit->second);
          }
          if (answered(child.state)) return {true, depth};
          if (++explored > node_budget) {
            throw Error(ErrorCode::GuardExceeded, "brute force state budget exhausted");
          }
          if (depth < max_depth) next.push_back(std::move(child));
        }
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return {false, max_depth};
}

}  // namespace wsc
