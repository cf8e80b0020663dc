#include "wsc/composer.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "similarity.hpp"
#include "wsc/error.hpp"

namespace wsc {

std::string_view to_string(NotSolvedReason reason) noexcept {
  switch (reason) {
    case NotSolvedReason::NoProgress: return "NoProgress";
    case NotSolvedReason::IterationBound: return "IterationBound";
    case NotSolvedReason::ObjectBound: return "ObjectBound";
  }
  return "Unknown";
}

void validate_problem(const CompositionProblem& problem) {
  validate_repository(problem.ontology, problem.repository);
  validate_request(problem.ontology, problem.request);
}

std::vector<Service> rule_services(const Ontology& ontology) {
  std::vector<Service> out;
  out.reserve(ontology.effective_rules().size());
  for (const auto& rule : ontology.effective_rules()) out.push_back(rule_as_virtual_service(rule));
  return out;
}

std::optional<Service> find_step_service(const CompositionProblem& problem, const std::string& name,
                                         bool virtual_step) {
  if (!virtual_step) {
    if (const auto* s = problem.repository.find(name)) return *s;
    return std::nullopt;
  }
  for (const auto& rule : problem.ontology.effective_rules()) {
    if (rule.name == name) return rule_as_virtual_service(rule);
  }
  return std::nullopt;
}

namespace {

Pins goal_pins(const Request& request, const GoalService& goal, std::span<const ObjectId> provided) {
  Pins pins;
  for (const auto& name : goal.pinned) {
    for (std::size_t i = 0; i < request.provided.size() && i < provided.size(); ++i) {
      if (request.provided[i].name == name) pins.emplace_back(name, provided[i]);
    }
  }
  return pins;
}

NamedBinding name_binding(const std::vector<ParameterDecl>& params, const Binding& binding) {
  NamedBinding out;
  out.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) out.emplace_back(params[i].name, binding[i]);
  return out;
}

// A service with names resolved, so proposing a call needs no lookups.
struct CallTemplate {
  struct End {
    bool output = false;
    std::uint32_t index = 0;
  };
  struct Atom {
    RelationIdx relation = 0;
    End from;
    End to;
  };
  std::vector<ConceptIdx> outputs;
  std::vector<Atom> atoms;
};

CallTemplate compile_call(const Ontology& ontology, const Service& service) {
  CallTemplate t;
  for (const auto& p : service.outputs) t.outputs.push_back(ontology.concept_index(*p.type));
  auto end = [&](const std::string& name) {
    if (auto i = service.input_index(name)) return CallTemplate::End{false, static_cast<std::uint32_t>(*i)};
    if (auto o = service.output_index(name)) return CallTemplate::End{true, static_cast<std::uint32_t>(*o)};
    throw Error(ErrorCode::UnboundParameter, "service '" + service.name + "' effect mentions '" + name + "'");
  };
  for (const auto& atom : service.effects) {
    t.atoms.push_back({ontology.relation_index(atom.relation), end(atom.from), end(atom.to)});
  }
  return t;
}

// A call's effects before it touches the state. Fresh objects take the ids
// the state would hand out next.
struct Proposal {
  ObjectId first_fresh;
  const std::vector<ConceptIdx>* fresh_types = nullptr;
  std::vector<RelationEdge> new_edges;

  bool is_fresh(ObjectId id) const { return id.value >= first_fresh.value; }
  std::size_t slot(ObjectId id) const { return id.value - first_fresh.value; }
};

void propose(const KnowledgeState& state, const CallTemplate& t, const Binding& binding, Proposal& out) {
  out.first_fresh = ObjectId{state.next_id()};
  out.fresh_types = &t.outputs;
  out.new_edges.clear();
  auto resolve = [&](CallTemplate::End e) {
    return e.output ? ObjectId{out.first_fresh.value + e.index} : binding[e.index];
  };
  for (const auto& atom : t.atoms) {
    const RelationEdge edge{atom.relation, resolve(atom.from), resolve(atom.to)};
    if (!out.is_fresh(edge.src) && !out.is_fresh(edge.dst) && state.has_edge(edge)) continue;
    if (std::find(out.new_edges.begin(), out.new_edges.end(), edge) != out.new_edges.end()) continue;
    out.new_edges.push_back(edge);
  }
}

// True iff the call's contribution folds back into the old state: some map
// from the fresh objects to pre-existing objects of the same concept or a
// subtype, identity elsewhere, sends every new edge onto an old edge. Any
// later match that uses the fresh objects then has a counterpart without
// them, so the call adds nothing a homomorphic matcher could exploit.
bool dominated(const Ontology& ontology, const KnowledgeState& state, const Proposal& call,
               const std::vector<std::vector<ObjectId>>& existing_by_concept) {
  const auto& types = *call.fresh_types;
  std::vector<ObjectId> image(types.size());
  std::vector<char> placed(types.size(), 0);

  auto resolve = [&](ObjectId id, bool& known) {
    if (!call.is_fresh(id)) return id;
    const std::size_t i = call.slot(id);
    known = placed[i] != 0;
    return image[i];
  };
  // Edges with an old endpoint pair are absent from the state by
  // construction, so the lookup alone rejects them.
  auto consistent = [&] {
    for (const auto& e : call.new_edges) {
      bool ks = true;
      bool kd = true;
      const ObjectId s = resolve(e.src, ks);
      const ObjectId d = resolve(e.dst, kd);
      if (ks && kd && !state.has_edge(RelationEdge{e.relation, s, d})) return false;
    }
    return true;
  };

  std::vector<std::vector<ObjectId>> candidates(types.size());
  for (std::size_t i = 0; i < types.size(); ++i) {
    const ObjectId f{call.first_fresh.value + static_cast<std::uint32_t>(i)};
    const ConceptIdx c = types[i];
    // An edge between f and an old object p pins f's image to p's
    // neighbors along the same relation and direction.
    const RelationEdge* anchor = nullptr;
    for (const auto& e : call.new_edges) {
      if ((e.src == f && !call.is_fresh(e.dst)) || (e.dst == f && !call.is_fresh(e.src))) {
        anchor = &e;
        break;
      }
    }
    if (anchor != nullptr) {
      const bool outgoing = anchor->src == f;
      const ObjectId p = outgoing ? anchor->dst : anchor->src;
      for (std::size_t idx : state.incident(p)) {
        const RelationEdge& e = state.edges()[idx];
        if (e.relation != anchor->relation || (outgoing ? e.dst : e.src) != p) continue;
        const ObjectId x = outgoing ? e.src : e.dst;
        if (ontology.is_subtype(state.object(x).type, c)) candidates[i].push_back(x);
      }
    } else {
      for (const ConceptIdx sub : ontology.subtypes(c)) {
        const auto& pool = existing_by_concept[sub];
        candidates[i].insert(candidates[i].end(), pool.begin(), pool.end());
      }
    }
    if (candidates[i].empty()) return false;
  }

  auto search = [&](auto& self, std::size_t i) -> bool {
    if (i == image.size()) return true;
    for (const ObjectId cand : candidates[i]) {
      image[i] = cand;
      placed[i] = 1;
      if (consistent() && self(self, i + 1)) return true;
    }
    placed[i] = 0;
    return false;
  };
  return consistent() && search(search, 0);
}

// The rest of the usefulness test, for an undominated call already applied
// to `state`. The listed per-concept objects are the pre-existing ones.
bool useful_once_applied(const KnowledgeState& state, const CallEffects& effects,
                         const std::vector<std::vector<ObjectId>>& existing_by_concept) {
  auto is_fresh = [&](ObjectId id) {
    return std::any_of(effects.produced.begin(), effects.produced.end(),
                       [id](const auto& p) { return p.second == id; });
  };
  for (const auto& e : effects.new_edges) {
    if (!is_fresh(e.src) && !is_fresh(e.dst)) return true;
  }
  for (const auto& [param, id] : effects.produced) {
    const ConceptIdx c = state.object(id).type;
    if (!detail::has_similar(state, id, existing_by_concept[c])) return true;
  }
  return false;
}

void check_config(const ComposerConfig& config) {
  if (config.max_iterations == 0) throw Error(ErrorCode::InvalidConfig, "max iterations must be positive");
  if (config.max_objects == 0) throw Error(ErrorCode::InvalidConfig, "max objects must be positive");
}

}  // namespace

bool provides_useful_information(const Ontology& ontology, const KnowledgeState& state,
                                 const Service& service, const Binding& binding) {
  std::vector<std::vector<ObjectId>> by_concept(ontology.concept_count());
  for (const auto& o : state.objects()) by_concept[o.type].push_back(o.id);
  const CallTemplate t = compile_call(ontology, service);
  Proposal call;
  propose(state, t, binding, call);
  if (dominated(ontology, state, call, by_concept)) return false;
  KnowledgeState scratch = state;
  auto effects = apply_call_effects(ontology, scratch, service, binding, 0);
  return useful_once_applied(scratch, effects, by_concept);
}

std::optional<Binding> can_answer_query(const Ontology& ontology, const KnowledgeState& state,
                                        const Request& request, std::span<const ObjectId> provided,
                                        bool injective) {
  const GoalService goal = request_as_goal_service(request);
  const QueryGraph query = build_query_graph(ontology, goal.service, goal_pins(request, goal, provided));
  const DataGraph data = DataGraph::build(ontology, state);
  MatchConfig cfg;
  cfg.mode = MatchConfig::Mode::FirstOnly;
  cfg.injective = injective;
  auto found = split_and_match(query, data, cfg);
  if (found.empty()) return std::nullopt;
  return found.front();
}

ComposeResult compose(const CompositionProblem& problem, const ComposerConfig& config) {
  check_config(config);
  const Ontology& onto = problem.ontology;

  InitialKnowledge init = init_from_request(onto, problem.request);
  KnowledgeState& state = init.state;

  std::vector<Service> services = problem.repository.services;
  const std::size_t plain_count = services.size();
  for (auto& s : rule_services(onto)) services.push_back(std::move(s));
  std::vector<QueryGraph> queries;
  std::vector<CallTemplate> templates;
  queries.reserve(services.size());
  templates.reserve(services.size());
  for (const auto& s : services) {
    queries.push_back(build_query_graph(onto, s));
    templates.push_back(compile_call(onto, s));
  }

  const GoalService goal = request_as_goal_service(problem.request);
  const QueryGraph goal_query =
      build_query_graph(onto, goal.service, goal_pins(problem.request, goal, init.provided));

  MatchConfig all_cfg;
  all_cfg.injective = config.injective;
  all_cfg.prune = config.matcher_pruning;
  MatchConfig first_cfg = all_cfg;
  first_cfg.mode = MatchConfig::Mode::FirstOnly;

  std::vector<std::vector<ObjectId>> by_concept(onto.concept_count());
  for (const auto& o : state.objects()) by_concept[o.type].push_back(o.id);

  DataGraph data(onto);
  Proposal proposal;
  std::vector<ServiceCall> calls;
  std::size_t iterations = 0;

  auto finish = [&](const Binding& goal_binding) {
    CompositionPlan plan;
    plan.iterations = iterations;
    plan.goal_binding = name_binding(goal.service.inputs, goal_binding);
    for (const auto& o : state.objects()) {
      if (o.provenance.kind == Provenance::Kind::FromRequest) plan.objects.push_back(o);
    }
    for (auto& call : calls) {
      for (const auto& [param, id] : call.produced) plan.objects.push_back(state.object(id));
      plan.calls.push_back(std::move(call));
    }
    if (!config.include_rule_calls) return without_rule_calls(std::move(plan));
    return plan;
  };
  auto goal_match = [&] {
    data.sync(state);
    return split_and_match(goal_query, data, first_cfg);
  };

  if (auto found = goal_match(); !found.empty()) return finish(found.front());
  while (true) {
    if (iterations == config.max_iterations) {
      return NotSolved{NotSolvedReason::IterationBound, iterations, state.objects().size()};
    }
    ++iterations;
    bool updated = false;

    for (std::size_t s = 0; s < services.size(); ++s) {
      data.sync(state);
      const std::size_t calls_before = calls.size();
      bool over_bound = false;
      for_each_match(queries[s], data, all_cfg, [&](const Binding& binding) {
        // Rejected calls still consume their ids, as if they had been
        // applied and rolled back.
        propose(state, templates[s], binding, proposal);
        if (dominated(onto, state, proposal, by_concept)) {
          state.skip_ids(templates[s].outputs.size());
          return true;
        }
        const auto cp = state.checkpoint();
        auto effects = apply_call_effects(onto, state, services[s], binding, calls.size());
        if (!useful_once_applied(state, effects, by_concept)) {
          state.rollback(cp);
          return true;
        }
        updated = true;
        for (const auto& [param, id] : effects.produced) {
          by_concept[state.object(id).type].push_back(id);
        }
        ServiceCall call;
        call.index = calls.size();
        call.service = services[s].name;
        call.is_virtual = s >= plain_count;
        call.binding = name_binding(services[s].inputs, binding);
        call.produced = std::move(effects.produced);
        call.added_edges = std::move(effects.new_edges);
        calls.push_back(std::move(call));
        over_bound = state.objects().size() > config.max_objects;
        return !over_bound;
      });
      if (over_bound) return NotSolved{NotSolvedReason::ObjectBound, iterations, state.objects().size()};
      // Checking after every productive service, not only once per sweep,
      // stops the search before an unrelated service floods the state.
      if (calls.size() != calls_before) {
        if (auto found = goal_match(); !found.empty()) return finish(found.front());
      }
    }
    if (!updated) return NotSolved{NotSolvedReason::NoProgress, iterations, state.objects().size()};
  }
}

CompositionPlan without_rule_calls(CompositionPlan plan) {
  std::erase_if(plan.calls, [](const ServiceCall& c) { return c.is_virtual; });
  plan.rule_calls_included = false;
  return plan;
}

CompositionPlan prune_plan(const CompositionPlan& plan, const CompositionProblem& problem) {
  const Ontology& onto = problem.ontology;
  if (!plan.rule_calls_included) {
    throw Error(ErrorCode::InvalidConfig, "pruning needs a plan that lists rule applications");
  }
  std::vector<Service> step_services;
  step_services.reserve(plan.calls.size());
  for (const auto& call : plan.calls) {
    auto s = find_step_service(problem, call.service, call.is_virtual);
    if (!s) throw Error(ErrorCode::UnknownParameter, "plan refers to unknown service '" + call.service + "'");
    step_services.push_back(std::move(*s));
  }

  auto lookup = [](const NamedBinding& b, const std::string& name) -> std::optional<ObjectId> {
    for (const auto& [param, id] : b) {
      if (param == name) return id;
    }
    return std::nullopt;
  };

  std::unordered_set<ObjectId> need_objects;
  std::unordered_set<RelationEdge, RelationEdgeHash> need_edges;
  auto require_atoms = [&](const std::vector<RelationAtom>& atoms, const NamedBinding& binding) {
    for (const auto& atom : atoms) {
      auto from = lookup(binding, atom.from);
      auto to = lookup(binding, atom.to);
      if (from && to) need_edges.insert(RelationEdge{onto.relation_index(atom.relation), *from, *to});
    }
  };
  for (const auto& [param, id] : plan.goal_binding) need_objects.insert(id);
  require_atoms(problem.request.wanted_relations, plan.goal_binding);

  std::vector<char> keep(plan.calls.size(), 0);
  for (std::size_t i = plan.calls.size(); i-- > 0;) {
    const auto& call = plan.calls[i];
    bool needed = std::any_of(call.produced.begin(), call.produced.end(),
                              [&](const auto& p) { return need_objects.contains(p.second); }) ||
                  std::any_of(call.added_edges.begin(), call.added_edges.end(),
                              [&](const auto& e) { return need_edges.contains(e); });
    if (!needed) continue;
    keep[i] = 1;
    for (const auto& [param, id] : call.binding) need_objects.insert(id);
    require_atoms(step_services[i].preconditions, call.binding);
  }

  // Replay the kept calls from the request's initial knowledge.
  InitialKnowledge init = init_from_request(onto, problem.request);
  std::unordered_map<ObjectId, ObjectId> remap;
  for (const auto& o : init.state.objects()) remap.emplace(o.id, o.id);
  auto mapped = [&](ObjectId id) {
    auto it = remap.find(id);
    if (it == remap.end()) {
      throw Error(ErrorCode::UnknownObject, "plan object #" + std::to_string(id.value) + " unresolved");
    }
    return it->second;
  };

  CompositionPlan out;
  out.iterations = plan.iterations;
  out.rule_calls_included = plan.rule_calls_included;
  out.objects = init.state.objects();
  for (std::size_t i = 0; i < plan.calls.size(); ++i) {
    if (!keep[i]) continue;
    const auto& call = plan.calls[i];
    Binding binding;
    for (const auto& [param, id] : call.binding) binding.push_back(mapped(id));
    ServiceCall next;
    next.index = out.calls.size();
    next.service = call.service;
    next.is_virtual = call.is_virtual;
    next.binding = name_binding(step_services[i].inputs, binding);
    auto effects = apply_call_effects(onto, init.state, step_services[i], binding, next.index);
    for (std::size_t k = 0; k < effects.produced.size() && k < call.produced.size(); ++k) {
      remap[call.produced[k].second] = effects.produced[k].second;
      out.objects.push_back(init.state.object(effects.produced[k].second));
    }
    next.produced = std::move(effects.produced);
    next.added_edges = std::move(effects.new_edges);
    out.calls.push_back(std::move(next));
  }
  for (const auto& [param, id] : plan.goal_binding) out.goal_binding.emplace_back(param, mapped(id));
  return out;
}

}  // namespace wsc
