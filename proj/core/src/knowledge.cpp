#include "wsc/knowledge.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <tuple>

#include "wsc/error.hpp"

namespace wsc {

const ObjectInstance& KnowledgeState::object(ObjectId id) const {
  if (!contains(id)) throw Error(ErrorCode::UnknownObject, "object #" + std::to_string(id.value));
  return objects_[slot_[id.value]];
}

ObjectId KnowledgeState::add_object(ConceptIdx type, Provenance provenance) {
  ObjectId id{next_id_++};
  slot_.push_back(static_cast<std::uint32_t>(objects_.size()));
  incident_.emplace_back();
  parent_.push_back(id.value);
  comp_nodes_.push_back(1);
  comp_edges_.push_back(0);
  objects_.push_back(ObjectInstance{id, type, std::move(provenance)});
  return id;
}

void KnowledgeState::skip_ids(std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    slot_.push_back(kNoSlot);
    incident_.emplace_back();
    parent_.push_back(next_id_);
    comp_nodes_.push_back(1);
    comp_edges_.push_back(0);
    ++next_id_;
  }
}

bool KnowledgeState::add_edge(const RelationEdge& edge) {
  if (!contains(edge.src)) throw Error(ErrorCode::UnknownObject, "edge source #" + std::to_string(edge.src.value));
  if (!contains(edge.dst)) throw Error(ErrorCode::UnknownObject, "edge target #" + std::to_string(edge.dst.value));
  if (!edge_set_.insert(edge).second) return false;
  const std::size_t idx = edges_.size();
  edges_.push_back(edge);
  incident_[edge.src.value].push_back(idx);
  if (edge.dst != edge.src) incident_[edge.dst.value].push_back(idx);
  std::uint32_t a = find(edge.src.value);
  std::uint32_t b = find(edge.dst.value);
  if (a != b) {
    if (comp_nodes_[a] < comp_nodes_[b]) std::swap(a, b);
    parent_[b] = a;
    comp_nodes_[a] += comp_nodes_[b];
    comp_edges_[a] += comp_edges_[b];
  }
  ++comp_edges_[a];
  merges_.push_back({b, a});
  return true;
}

std::uint32_t KnowledgeState::find(std::uint32_t v) const {
  while (parent_[v] != v) v = parent_[v];
  return v;
}

KnowledgeState::ComponentSize KnowledgeState::component_size(ObjectId id) const {
  if (!contains(id)) throw Error(ErrorCode::UnknownObject, "object #" + std::to_string(id.value));
  const std::uint32_t r = find(id.value);
  return {comp_nodes_[r], comp_edges_[r]};
}

const std::vector<std::size_t>& KnowledgeState::incident(ObjectId id) const {
  if (!contains(id)) throw Error(ErrorCode::UnknownObject, "object #" + std::to_string(id.value));
  return incident_[id.value];
}

void KnowledgeState::rollback(const Checkpoint& cp) {
  while (edges_.size() > cp.edges) {
    const RelationEdge e = edges_.back();
    const std::size_t idx = edges_.size() - 1;
    edge_set_.erase(e);
    for (ObjectId end : {e.src, e.dst}) {
      auto& inc = incident_[end.value];
      if (!inc.empty() && inc.back() == idx) inc.pop_back();
    }
    edges_.pop_back();
    const Merge m = merges_.back();
    merges_.pop_back();
    --comp_edges_[m.root];
    if (m.child != m.root) {
      parent_[m.child] = m.child;
      comp_nodes_[m.root] -= comp_nodes_[m.child];
      comp_edges_[m.root] -= comp_edges_[m.child];
    }
  }
  while (objects_.size() > cp.objects) {
    const ObjectId id = objects_.back().id;
    slot_[id.value] = kNoSlot;
    incident_[id.value].clear();
    objects_.pop_back();
  }
}

InitialKnowledge init_from_request(const Ontology& ontology, const Request& request) {
  InitialKnowledge init;
  for (const auto& p : request.provided) {
    init.provided.push_back(init.state.add_object(
        ontology.concept_index(*p.type), Provenance{Provenance::Kind::FromRequest, p.name, 0}));
  }
  auto resolve = [&](const std::string& name) {
    for (std::size_t i = 0; i < request.provided.size(); ++i) {
      if (request.provided[i].name == name) return init.provided[i];
    }
    throw Error(ErrorCode::UnknownParameter, "request relation mentions '" + name + "'");
  };
  for (const auto& atom : request.provided_relations) {
    init.state.add_edge(
        RelationEdge{ontology.relation_index(atom.relation), resolve(atom.from), resolve(atom.to)});
  }
  return init;
}

CallEffects apply_call_effects(const Ontology& ontology, KnowledgeState& state,
                               const Service& service, const Binding& binding,
                               std::size_t call_index) {
  if (binding.size() != service.inputs.size()) {
    throw Error(ErrorCode::UnboundParameter,
                "service '" + service.name + "' expects " + std::to_string(service.inputs.size()) +
                    " bound inputs, got " + std::to_string(binding.size()));
  }
  for (ObjectId id : binding) {
    if (!state.contains(id)) {
      throw Error(ErrorCode::UnknownObject, "binding refers to #" + std::to_string(id.value));
    }
  }
  CallEffects out;
  for (const auto& p : service.outputs) {
    out.produced.emplace_back(
        p.name, state.add_object(ontology.concept_index(*p.type),
                                 Provenance{Provenance::Kind::FromCall, p.name, call_index}));
  }
  auto resolve = [&](const std::string& name) -> ObjectId {
    if (auto i = service.input_index(name)) return binding[*i];
    if (auto o = service.output_index(name)) return out.produced[*o].second;
    throw Error(ErrorCode::UnboundParameter,
                "service '" + service.name + "' effect mentions '" + name + "'");
  };
  for (const auto& atom : service.effects) {
    RelationEdge edge{ontology.relation_index(atom.relation), resolve(atom.from), resolve(atom.to)};
    if (state.add_edge(edge)) out.new_edges.push_back(edge);
  }
  return out;
}

Component connected_component(const KnowledgeState& state, ObjectId obj) {
  Component comp;
  state.object(obj);  // existence check
  std::unordered_set<ObjectId> seen{obj};
  std::vector<std::size_t> edge_ids;
  std::vector<ObjectId> frontier{obj};
  while (!frontier.empty()) {
    ObjectId v = frontier.back();
    frontier.pop_back();
    comp.nodes.push_back(v);
    for (std::size_t e : state.incident(v)) {
      const auto& edge = state.edges()[e];
      if (edge.src == v) edge_ids.push_back(e);  // each edge counted once, at its source
      ObjectId other = edge.src == v ? edge.dst : edge.src;
      if (seen.insert(other).second) frontier.push_back(other);
    }
  }
  std::sort(comp.nodes.begin(), comp.nodes.end());
  comp.edges.reserve(edge_ids.size());
  for (std::size_t e : edge_ids) comp.edges.push_back(state.edges()[e]);
  std::sort(comp.edges.begin(), comp.edges.end());
  return comp;
}

void dump_knowledge(std::ostream& out, const Ontology& ontology, const KnowledgeState& state) {
  out << "objects " << state.objects().size() << "\n";
  for (const auto& o : state.objects()) {
    out << "  #" << o.id.value << ' ' << ontology.concept_name(o.type) << ' ';
    if (o.provenance.kind == Provenance::Kind::FromRequest) {
      out << "request:" << o.provenance.param;
    } else {
      out << "call" << o.provenance.call_index << ':' << o.provenance.param;
    }
    out << "\n";
  }
  std::vector<std::tuple<std::string, std::uint32_t, std::uint32_t>> edges;
  edges.reserve(state.edges().size());
  for (const auto& e : state.edges()) {
    edges.emplace_back(ontology.relation(e.relation).name, e.src.value, e.dst.value);
  }
  std::sort(edges.begin(), edges.end());
  out << "edges " << edges.size() << "\n";
  for (const auto& [rel, src, dst] : edges) {
    out << "  " << rel << " #" << src << " #" << dst << "\n";
  }
}

std::string dump_knowledge(const Ontology& ontology, const KnowledgeState& state) {
  std::ostringstream out;
  dump_knowledge(out, ontology, state);
  return out.str();
}

}  // namespace wsc
