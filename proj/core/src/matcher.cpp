#include "wsc/matcher.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "wsc/error.hpp"

namespace wsc {

QueryGraph build_query_graph(const Ontology& ontology, const Service& service, const Pins& pins) {
  QueryGraph q;
  q.nodes.reserve(service.inputs.size());
  for (const auto& p : service.inputs) {
    QueryNode node;
    node.param = p.name;
    if (p.is_any()) {
      node.kind = QueryNode::Kind::Any;
    } else {
      node.kind = QueryNode::Kind::Concept;
      node.type = ontology.concept_index(*p.type);
    }
    q.nodes.push_back(std::move(node));
  }
  for (const auto& [param, object] : pins) {
    auto idx = service.input_index(param);
    if (!idx) {
      throw Error(ErrorCode::PinTargetMissing,
                  "service '" + service.name + "' has no input '" + param + "' to pin");
    }
    q.nodes[*idx].kind = QueryNode::Kind::Pinned;
    q.nodes[*idx].pinned = object;
  }
  for (const auto& atom : service.preconditions) {
    auto from = service.input_index(atom.from);
    auto to = service.input_index(atom.to);
    if (!from || !to) {
      throw Error(ErrorCode::UnknownParameter, "service '" + service.name +
                                                   "' precondition mentions a non-input parameter");
    }
    q.edges.push_back(QueryEdge{ontology.relation_index(atom.relation),
                                static_cast<std::uint32_t>(*from), static_cast<std::uint32_t>(*to)});
  }
  return q;
}

DataGraph DataGraph::build(const Ontology& ontology, const KnowledgeState& state) {
  DataGraph g(ontology);
  g.sync(state);
  return g;
}

void DataGraph::sync(const KnowledgeState& state) {
  if (by_label_.size() < ontology_->concept_count()) by_label_.resize(ontology_->concept_count());
  const auto& objects = state.objects();
  for (; synced_objects_ < objects.size(); ++synced_objects_) {
    const auto& o = objects[synced_objects_];
    const auto node = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(o.id);
    concepts_.push_back(o.type);
    node_of_.emplace(o.id.value, node);
    for (ConceptIdx c : ontology_->supertypes(o.type)) by_label_[c].push_back(node);
    out_.emplace_back();
    in_.emplace_back();
  }
  const auto& edges = state.edges();
  for (; synced_edges_ < edges.size(); ++synced_edges_) {
    const auto& e = edges[synced_edges_];
    const std::uint32_t s = node_of_.at(e.src.value);
    const std::uint32_t t = node_of_.at(e.dst.value);
    if (!edge_keys_.insert(RelationEdge{e.relation, ObjectId{s}, ObjectId{t}}).second) continue;
    ++edge_count_;
    out_[s].emplace_back(e.relation, t);
    in_[t].emplace_back(e.relation, s);
    ++out_degree_[degree_key(s, e.relation)];
    ++in_degree_[degree_key(t, e.relation)];
  }
}

std::optional<std::uint32_t> DataGraph::node_of(ObjectId id) const {
  auto it = node_of_.find(id.value);
  if (it == node_of_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::uint32_t> DataGraph::candidates(ConceptIdx c) const {
  if (c >= by_label_.size()) return {};
  return by_label_[c];
}

bool DataGraph::has_edge(RelationIdx r, std::uint32_t from, std::uint32_t to) const {
  return edge_keys_.contains(RelationEdge{r, ObjectId{from}, ObjectId{to}});
}

std::uint32_t DataGraph::out_degree(std::uint32_t node, RelationIdx r) const {
  auto it = out_degree_.find(degree_key(node, r));
  return it == out_degree_.end() ? 0 : it->second;
}

std::uint32_t DataGraph::in_degree(std::uint32_t node, RelationIdx r) const {
  auto it = in_degree_.find(degree_key(node, r));
  return it == in_degree_.end() ? 0 : it->second;
}

namespace {

constexpr std::int64_t kUnassigned = -1;

bool label_ok(const QueryNode& node, const DataGraph& data, std::uint32_t x) {
  switch (node.kind) {
    case QueryNode::Kind::Any: return true;
    case QueryNode::Kind::Concept: return data.has_label(x, node.type);
    case QueryNode::Kind::Pinned: return data.object(x) == node.pinned;
  }
  return false;
}

class Search {
 public:
  Search(const QueryGraph& q, const DataGraph& d, const MatchConfig& cfg)
      : q_(q), d_(d), cfg_(cfg), incident_(q.nodes.size()), assign_(q.nodes.size(), kUnassigned) {
    for (std::uint32_t e = 0; e < q.edges.size(); ++e) {
      incident_[q.edges[e].from].push_back(e);
      if (q.edges[e].to != q.edges[e].from) incident_[q.edges[e].to].push_back(e);
    }
    if (cfg.injective) used_.assign(d.node_count(), 0);
    build_base_candidates();
    build_order();
    if (cfg.prune) build_signatures();
  }

  std::vector<Binding> run() {
    if (q_.nodes.empty()) {
      results_.emplace_back();
      return std::move(results_);
    }
    descend(0);
    if (cfg_.mode == MatchConfig::Mode::All) std::sort(results_.begin(), results_.end());
    return std::move(results_);
  }

 private:
  void build_base_candidates() {
    base_.resize(q_.nodes.size());
    for (std::size_t v = 0; v < q_.nodes.size(); ++v) {
      const auto& node = q_.nodes[v];
      auto& out = base_[v];
      switch (node.kind) {
        case QueryNode::Kind::Any:
          out.resize(d_.node_count());
          std::iota(out.begin(), out.end(), 0U);
          break;
        case QueryNode::Kind::Concept: {
          auto c = d_.candidates(node.type);
          out.assign(c.begin(), c.end());
          break;
        }
        case QueryNode::Kind::Pinned:
          if (auto n = d_.node_of(node.pinned)) out.push_back(*n);
          break;
      }
    }
  }

  // Pinned first, then nodes adjacent to already ordered ones, then by
  // degree and label rarity. Without pruning: declaration order.
  void build_order() {
    const std::size_t n = q_.nodes.size();
    order_.clear();
    anchor_.assign(n, -1);
    if (!cfg_.prune) {
      order_.resize(n);
      std::iota(order_.begin(), order_.end(), 0U);
      return;
    }
    std::vector<char> placed(n, 0);
    for (std::size_t step = 0; step < n; ++step) {
      std::int64_t best = -1;
      std::tuple<int, int, std::size_t, std::int64_t> best_key{};
      for (std::uint32_t v = 0; v < n; ++v) {
        if (placed[v]) continue;
        int connected = 0;
        for (auto e : incident_[v]) {
          const auto& edge = q_.edges[e];
          std::uint32_t other = edge.from == v ? edge.to : edge.from;
          if (other != v && placed[other]) connected = 1;
        }
        std::tuple<int, int, std::size_t, std::int64_t> key{
            q_.nodes[v].kind == QueryNode::Kind::Pinned ? 1 : 0, connected, incident_[v].size(),
            -static_cast<std::int64_t>(base_[v].size())};
        if (best < 0 || key > best_key) {
          best = v;
          best_key = key;
        }
      }
      const auto v = static_cast<std::uint32_t>(best);
      placed[v] = 1;
      for (auto e : incident_[v]) {
        const auto& edge = q_.edges[e];
        std::uint32_t other = edge.from == v ? edge.to : edge.from;
        if (other != v && placed[other] && anchor_[v] < 0 &&
            std::find(order_.begin(), order_.end(), other) != order_.end()) {
          anchor_[v] = e;
        }
      }
      order_.push_back(v);
    }
  }

  struct Need {
    RelationIdx relation;
    bool outgoing;
    std::uint32_t count;
  };

  void build_signatures() {
    needs_.assign(q_.nodes.size(), {});
    for (std::uint32_t v = 0; v < q_.nodes.size(); ++v) {
      std::vector<std::tuple<RelationIdx, bool, std::uint32_t>> adj;
      for (auto e : incident_[v]) {
        const auto& edge = q_.edges[e];
        if (edge.from == v) adj.emplace_back(edge.relation, true, edge.to);
        if (edge.to == v) adj.emplace_back(edge.relation, false, edge.from);
      }
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
      for (const auto& [rel, outgoing, other] : adj) {
        auto& needs = needs_[v];
        if (!needs.empty() && needs.back().relation == rel && needs.back().outgoing == outgoing) {
          ++needs.back().count;
        } else {
          needs.push_back(Need{rel, outgoing, 1});
        }
      }
    }
  }

  bool signature_ok(std::uint32_t v, std::uint32_t x) const {
    for (const auto& need : needs_[v]) {
      const std::uint32_t want = cfg_.injective ? need.count : 1;
      const std::uint32_t have =
          need.outgoing ? d_.out_degree(x, need.relation) : d_.in_degree(x, need.relation);
      if (have < want) return false;
    }
    return true;
  }

  bool feasible(std::uint32_t v, std::uint32_t x) const {
    if (!label_ok(q_.nodes[v], d_, x)) return false;
    if (cfg_.injective && used_[x]) return false;
    if (cfg_.prune && !signature_ok(v, x)) return false;
    for (auto e : incident_[v]) {
      const auto& edge = q_.edges[e];
      const std::int64_t from = edge.from == v ? x : assign_[edge.from];
      const std::int64_t to = edge.to == v ? x : assign_[edge.to];
      if (from == kUnassigned || to == kUnassigned) continue;
      if (!d_.has_edge(edge.relation, static_cast<std::uint32_t>(from),
                       static_cast<std::uint32_t>(to))) {
        return false;
      }
    }
    return true;
  }

  void emit() {
    Binding b(q_.nodes.size());
    for (std::size_t v = 0; v < q_.nodes.size(); ++v) {
      b[v] = d_.object(static_cast<std::uint32_t>(assign_[v]));
    }
    results_.push_back(std::move(b));
    if (cfg_.mode == MatchConfig::Mode::FirstOnly) {
      done_ = true;
    } else if (cfg_.limit && results_.size() > *cfg_.limit) {
      throw Error(ErrorCode::LimitExceeded,
                  "more than " + std::to_string(*cfg_.limit) + " bindings");
    }
  }

  void try_candidate(std::size_t depth, std::uint32_t v, std::uint32_t x) {
    if (!feasible(v, x)) return;
    assign_[v] = x;
    if (cfg_.injective) used_[x] = 1;
    descend(depth + 1);
    if (cfg_.injective) used_[x] = 0;
    assign_[v] = kUnassigned;
  }

  void descend(std::size_t depth) {
    if (done_) return;
    if (depth == order_.size()) {
      emit();
      return;
    }
    const std::uint32_t v = order_[depth];
    if (anchor_[v] >= 0 && q_.nodes[v].kind != QueryNode::Kind::Pinned) {
      const auto& edge = q_.edges[static_cast<std::size_t>(anchor_[v])];
      if (edge.from == v) {
        const auto image = static_cast<std::uint32_t>(assign_[edge.to]);
        for (const auto& [rel, x] : d_.in(image)) {
          if (rel == edge.relation) try_candidate(depth, v, x);
          if (done_) return;
        }
      } else {
        const auto image = static_cast<std::uint32_t>(assign_[edge.from]);
        for (const auto& [rel, x] : d_.out(image)) {
          if (rel == edge.relation) try_candidate(depth, v, x);
          if (done_) return;
        }
      }
      return;
    }
    for (std::uint32_t x : base_[v]) {
      try_candidate(depth, v, x);
      if (done_) return;
    }
  }

  const QueryGraph& q_;
  const DataGraph& d_;
  const MatchConfig& cfg_;
  std::vector<std::vector<std::uint32_t>> incident_;
  std::vector<std::vector<std::uint32_t>> base_;
  std::vector<std::uint32_t> order_;
  std::vector<std::int64_t> anchor_;
  std::vector<std::vector<Need>> needs_;
  std::vector<std::int64_t> assign_;
  std::vector<char> used_;
  std::vector<Binding> results_;
  bool done_ = false;
};

QueryGraph subquery(const QueryGraph& q, const std::vector<std::uint32_t>& members) {
  QueryGraph sub;
  std::vector<std::int64_t> local(q.nodes.size(), -1);
  for (std::uint32_t i = 0; i < members.size(); ++i) {
    local[members[i]] = i;
    sub.nodes.push_back(q.nodes[members[i]]);
  }
  for (const auto& e : q.edges) {
    if (local[e.from] >= 0) {
      sub.edges.push_back(QueryEdge{e.relation, static_cast<std::uint32_t>(local[e.from]),
                                    static_cast<std::uint32_t>(local[e.to])});
    }
  }
  return sub;
}

}  // namespace

std::vector<Binding> enumerate_matches(const QueryGraph& query, const DataGraph& data,
                                       const MatchConfig& config) {
  if (config.limit && *config.limit == 0) {
    throw Error(ErrorCode::InvalidConfig, "match limit must be at least 1");
  }
  return Search(query, data, config).run();
}

std::vector<std::vector<std::uint32_t>> query_components(const QueryGraph& query) {
  const std::size_t n = query.nodes.size();
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0U);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : query.edges) {
    auto a = find(e.from);
    auto b = find(e.to);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<std::uint32_t>> comps;
  std::vector<std::int64_t> comp_of(n, -1);
  for (std::uint32_t v = 0; v < n; ++v) {
    auto root = find(v);
    if (comp_of[root] < 0) {
      comp_of[root] = static_cast<std::int64_t>(comps.size());
      comps.emplace_back();
    }
    comps[static_cast<std::size_t>(comp_of[root])].push_back(v);
  }
  return comps;
}

std::vector<Binding> split_and_match(const QueryGraph& query, const DataGraph& data,
                                     const MatchConfig& config) {
  if (config.limit && *config.limit == 0) {
    throw Error(ErrorCode::InvalidConfig, "match limit must be at least 1");
  }
  const auto comps = query_components(query);
  if (comps.size() <= 1) return enumerate_matches(query, data, config);

  const bool first_only = config.mode == MatchConfig::Mode::FirstOnly;
  MatchConfig part_config = config;
  part_config.limit.reset();
  // Non-injective existence needs just one witness per component.
  if (first_only && !config.injective) {
    Binding combined(query.nodes.size());
    for (const auto& members : comps) {
      auto found = enumerate_matches(subquery(query, members), data, part_config);
      if (found.empty()) return {};
      for (std::size_t i = 0; i < members.size(); ++i) combined[members[i]] = found[0][i];
    }
    return {combined};
  }

  std::vector<Binding> results;
  if (first_only) {
    // Injective FirstOnly: the first product element with disjoint parts.
    MatchConfig all = config;
    all.limit.reset();
    for_each_match(query, data, all, [&](const Binding& b) {
      results.push_back(b);
      return false;
    });
    return results;
  }
  for_each_match(query, data, config, [&](const Binding& b) {
    results.push_back(b);
    return true;
  });
  return results;
}

void for_each_match(const QueryGraph& query, const DataGraph& data, const MatchConfig& config,
                    const std::function<bool(const Binding&)>& visit) {
  MatchConfig part_config = config;
  part_config.mode = MatchConfig::Mode::All;
  part_config.limit.reset();
  const auto comps = query_components(query);
  if (comps.size() <= 1) {
    MatchConfig whole = part_config;
    whole.limit = config.limit;
    for (const auto& b : enumerate_matches(query, data, whole)) {
      if (!visit(b)) return;
    }
    return;
  }
  std::vector<std::vector<Binding>> parts;
  parts.reserve(comps.size());
  for (const auto& members : comps) {
    parts.push_back(enumerate_matches(subquery(query, members), data, part_config));
    if (parts.back().empty()) return;
  }

  // Cross product, walked node by node so bindings come out in
  // lexicographic order. Each component's parts are sorted in member order,
  // so the parts agreeing with the members fixed so far form a contiguous
  // range. Under injectivity, components must use disjoint objects.
  const std::size_t n = query.nodes.size();
  std::vector<std::uint32_t> comp_of(n);
  std::vector<std::uint32_t> rank(n);
  for (std::uint32_t c = 0; c < comps.size(); ++c) {
    for (std::uint32_t k = 0; k < comps[c].size(); ++k) {
      comp_of[comps[c][k]] = c;
      rank[comps[c][k]] = k;
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> range(comps.size());
  for (std::size_t c = 0; c < comps.size(); ++c) range[c] = {0, parts[c].size()};

  std::size_t produced = 0;
  bool stop = false;
  Binding partial(n);
  auto taken_elsewhere = [&](std::size_t i, ObjectId v) {
    for (std::size_t j = 0; j < i; ++j) {
      if (comp_of[j] != comp_of[i] && partial[j] == v) return true;
    }
    return false;
  };
  auto walk = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      if (config.limit && ++produced > *config.limit) {
        throw Error(ErrorCode::LimitExceeded, "more than " + std::to_string(*config.limit) + " bindings");
      }
      stop = !visit(partial);
      return;
    }
    const std::uint32_t c = comp_of[i];
    const std::uint32_t k = rank[i];
    const auto saved = range[c];
    const auto& ps = parts[c];
    for (std::size_t lo = saved.first; lo < saved.second && !stop;) {
      const ObjectId v = ps[lo][k];
      std::size_t hi = lo + 1;
      while (hi < saved.second && ps[hi][k] == v) ++hi;
      if (!config.injective || !taken_elsewhere(i, v)) {
        range[c] = {lo, hi};
        partial[i] = v;
        self(self, i + 1);
      }
      lo = hi;
    }
    range[c] = saved;
  };
  walk(walk, 0);
}

bool binding_satisfies(const QueryGraph& query, const DataGraph& data, const Binding& binding,
                       bool injective) {
  if (binding.size() != query.nodes.size()) return false;
  std::vector<std::uint32_t> nodes;
  nodes.reserve(binding.size());
  for (std::size_t v = 0; v < binding.size(); ++v) {
    auto n = data.node_of(binding[v]);
    if (!n || !label_ok(query.nodes[v], data, *n)) return false;
    nodes.push_back(*n);
  }
  for (const auto& e : query.edges) {
    if (!data.has_edge(e.relation, nodes[e.from], nodes[e.to])) return false;
  }
  if (injective) {
    auto sorted = nodes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  }
  return true;
}

}  // namespace wsc
