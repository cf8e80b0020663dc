#include "similarity.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

#include "wsc/error.hpp"

namespace wsc::detail {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t combine(std::uint64_t seed, std::uint64_t v) { return mix(seed ^ mix(v)); }

std::size_t distinct(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace

std::uint64_t ColoredComponent::digest(std::uint32_t local_index) const {
  return combine(signature, color[local_index]);
}

ColoredComponent color_component(const KnowledgeState& state, ObjectId root, bool refine,
                                 std::uint32_t max_rounds) {
  ColoredComponent c;
  Component comp = connected_component(state, root);
  c.nodes = std::move(comp.nodes);
  c.edge_count = comp.edges.size();
  const auto n = static_cast<std::uint32_t>(c.nodes.size());
  c.local.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) c.local.emplace(c.nodes[i], i);
  c.adj.assign(n, {});
  c.type.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) c.type[i] = state.object(c.nodes[i]).type;
  for (const auto& e : comp.edges) {
    std::uint32_t s = c.local.at(e.src);
    std::uint32_t d = c.local.at(e.dst);
    if (s == d) {
      c.adj[s].push_back({e.relation, 2, s});
    } else {
      c.adj[s].push_back({e.relation, 0, d});
      c.adj[d].push_back({e.relation, 1, s});
    }
  }

  c.color.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) c.color[i] = mix(c.type[i]);
  if (refine) {
    // Refine until the number of color classes stops growing or the round
    // cap is hit. Both stopping points are isomorphism-invariant, so
    // digests stay comparable across components.
    std::size_t classes = distinct(c.color);
    std::vector<std::uint64_t> next(n);
    std::vector<std::uint64_t> sig;
    for (std::uint32_t round = 0; round < std::min(n, max_rounds); ++round) {
      for (std::uint32_t i = 0; i < n; ++i) {
        sig.clear();
        for (const auto& a : c.adj[i]) {
          sig.push_back(combine(combine(a.relation, a.dir), c.color[a.other]));
        }
        std::sort(sig.begin(), sig.end());
        std::uint64_t h = c.color[i];
        for (auto s : sig) h = combine(h, s);
        next[i] = h;
      }
      c.color.swap(next);
      std::size_t now = distinct(c.color);
      if (now == classes) break;
      classes = now;
    }
  }
  std::vector<std::uint64_t> sorted = c.color;
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t sigh = combine(n, c.edge_count);
  for (auto s : sorted) sigh = combine(sigh, s);
  c.signature = sigh;
  return c;
}

namespace {

enum class Iso { No, Yes, GaveUp };

// Backtracking search; gives up after `budget` candidate placements.
Iso iso_search(const KnowledgeState& state, const ColoredComponent& A, std::uint32_t a,
               const ColoredComponent& B, std::uint32_t b, std::size_t budget) {
  const auto n = static_cast<std::uint32_t>(A.nodes.size());
  if (n != B.nodes.size() || A.edge_count != B.edge_count) return Iso::No;
  if (A.type[a] != B.type[b] || A.color[a] != B.color[b]) return Iso::No;

  // BFS order from a, so every node after the first has a mapped parent.
  std::vector<std::uint32_t> order{a};
  std::vector<std::uint32_t> parent(n, 0);
  std::vector<char> queued(n, 0);
  queued[a] = 1;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (const auto& adj : A.adj[order[head]]) {
      if (!queued[adj.other]) {
        queued[adj.other] = 1;
        parent[adj.other] = order[head];
        order.push_back(adj.other);
      }
    }
  }

  constexpr std::uint32_t kUnmapped = 0xFFFFFFFFU;
  std::vector<std::uint32_t> fwd(n, kUnmapped);
  std::vector<char> used(n, 0);

  auto edge_in_B = [&](const ColoredComponent::Adj& adj, std::uint32_t from_b, std::uint32_t to_b) {
    ObjectId x = B.nodes[from_b];
    ObjectId y = B.nodes[to_b];
    switch (adj.dir) {
      case 0: return state.has_edge(RelationEdge{adj.relation, x, y});
      case 1: return state.has_edge(RelationEdge{adj.relation, y, x});
      default: return from_b == to_b && state.has_edge(RelationEdge{adj.relation, x, x});
    }
  };

  // Edges from v to already-mapped nodes (v itself counts once mapped).
  auto consistent = [&](std::uint32_t v, std::uint32_t cand) {
    std::size_t count_a = 0;
    for (const auto& adj : A.adj[v]) {
      if (fwd[adj.other] == kUnmapped) continue;
      ++count_a;
      if (!edge_in_B(adj, cand, fwd[adj.other])) return false;
    }
    std::size_t count_b = 0;
    for (const auto& adj : B.adj[cand]) {
      if (adj.other == cand || used[adj.other]) ++count_b;
    }
    return count_a == count_b;
  };

  std::vector<std::vector<std::uint32_t>> cands(n);
  std::vector<std::size_t> pos(n, 0);
  auto fill = [&](std::size_t depth) {
    auto& out = cands[depth];
    out.clear();
    const std::uint32_t v = order[depth];
    if (depth == 0) {
      out.push_back(b);
      return;
    }
    for (const auto& adj : B.adj[fwd[parent[v]]]) {
      std::uint32_t w = adj.other;
      if (used[w] || B.type[w] != A.type[v] || B.color[w] != A.color[v]) continue;
      if (B.adj[w].size() != A.adj[v].size()) continue;
      out.push_back(w);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  };

  std::size_t depth = 0;
  std::size_t steps = 0;
  fill(0);
  while (true) {
    if (++steps > budget) return Iso::GaveUp;
    if (pos[depth] == cands[depth].size()) {
      if (depth == 0) return Iso::No;
      pos[depth] = 0;
      --depth;
      const std::uint32_t v = order[depth];
      used[fwd[v]] = 0;
      fwd[v] = kUnmapped;
      ++pos[depth];
      continue;
    }
    const std::uint32_t v = order[depth];
    const std::uint32_t cand = cands[depth][pos[depth]];
    fwd[v] = cand;
    used[cand] = 1;
    if (!consistent(v, cand)) {
      used[cand] = 0;
      fwd[v] = kUnmapped;
      ++pos[depth];
      continue;
    }
    if (depth + 1 == n) return Iso::Yes;
    ++depth;
    pos[depth] = 0;
    fill(depth);
  }
}

}  // namespace

bool isomorphic_at(const KnowledgeState& state, const ColoredComponent& A, std::uint32_t a,
                   const ColoredComponent& B, std::uint32_t b) {
  return iso_search(state, A, a, B, b, std::numeric_limits<std::size_t>::max()) == Iso::Yes;
}

namespace {

// Refinement color after `rounds` rounds, computed from the object's
// neighborhood of that radius only. It equals the color a full-component
// refinement assigns after the same number of rounds, so it is an
// isomorphism invariant that costs nothing beyond the ball around `v`.
class LocalColors {
 public:
  explicit LocalColors(const KnowledgeState& state) : state_(state) {}

  std::uint64_t color(ObjectId v, std::uint32_t rounds) {
    if (rounds == 0) return mix(state_.object(v).type);
    const std::uint64_t key = (std::uint64_t{v.value} << 8) | rounds;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const auto& incident = state_.incident(v);
    std::vector<std::uint64_t> sig;
    sig.reserve(incident.size());
    for (std::size_t e : incident) {
      const auto& edge = state_.edges()[e];
      std::uint64_t dir = 2;
      ObjectId other = v;
      if (edge.src != edge.dst) {
        dir = edge.src == v ? 0 : 1;
        other = edge.src == v ? edge.dst : edge.src;
      }
      sig.push_back(combine(combine(edge.relation, dir), color(other, rounds - 1)));
    }
    std::sort(sig.begin(), sig.end());
    std::uint64_t h = color(v, rounds - 1);
    for (auto x : sig) h = combine(h, x);
    memo_.emplace(key, h);
    return h;
  }

 private:
  const KnowledgeState& state_;
  std::unordered_map<std::uint64_t, std::uint64_t> memo_;
};

}  // namespace

namespace {

// `steps_per_node` bounds each search relative to the component size; zero
// means unbounded.
Iso similar_among(const KnowledgeState& state, ObjectId obj, std::span<const ObjectId> candidates,
                  std::uint32_t rounds, std::size_t steps_per_node) {
  const ColoredComponent mine = color_component(state, obj, true, rounds);
  const std::size_t budget = steps_per_node == 0 ? std::numeric_limits<std::size_t>::max()
                                                 : steps_per_node * (mine.nodes.size() + 1);
  const std::uint32_t me = mine.local.at(obj);
  const std::uint64_t my_digest = mine.digest(me);

  std::unordered_set<ObjectId> done;
  for (ObjectId cand : candidates) {
    if (done.contains(cand)) continue;
    if (mine.local.contains(cand)) {
      // Same component: look for an automorphism moving obj onto cand.
      const std::uint32_t c = mine.local.at(cand);
      done.insert(cand);
      if (mine.color[c] != mine.color[me]) continue;
      if (const Iso r = iso_search(state, mine, me, mine, c, budget); r != Iso::No) return r;
      continue;
    }
    const ColoredComponent other = color_component(state, cand, true, rounds);
    for (ObjectId member : other.nodes) done.insert(member);
    if (other.signature != mine.signature) continue;
    for (ObjectId c2 : candidates) {
      auto it = other.local.find(c2);
      if (it == other.local.end()) continue;
      if (other.digest(it->second) != my_digest) continue;
      if (const Iso r = iso_search(state, mine, me, other, it->second, budget); r != Iso::No) return r;
    }
  }
  return Iso::No;
}

}  // namespace

bool has_similar(const KnowledgeState& state, ObjectId obj, std::span<const ObjectId> all_candidates) {
  constexpr std::uint32_t kLocalRounds = 2;
  LocalColors local(state);
  const std::uint64_t mine = local.color(obj, kLocalRounds);
  const auto my_size = state.component_size(obj);
  std::vector<ObjectId> candidates;
  for (ObjectId cand : all_candidates) {
    if (cand == obj || state.component_size(cand) != my_size) continue;
    if (local.color(cand, kLocalRounds) == mine) candidates.push_back(cand);
  }
  // Deeper balls refute most survivors long before a whole-component
  // refinement would, which matters once everything is one big component.
  constexpr std::uint32_t kDeepRounds = 16;
  for (std::uint32_t r = kLocalRounds + 1; r <= kDeepRounds && !candidates.empty(); ++r) {
    const std::uint64_t deep = local.color(obj, r);
    std::erase_if(candidates, [&](ObjectId c) { return local.color(c, r) != deep; });
  }
  if (candidates.empty()) return false;
  // Cheap attempt first: a few refinement rounds and a bounded search. Full
  // refinement costs a round per link on long chains, but weak colors can
  // make the search blow up on symmetric components, so fall back to it
  // only when the bounded search gives up.
  constexpr std::uint32_t kRounds = 3;
  const Iso quick = similar_among(state, obj, candidates, kRounds, 16);
  if (quick != Iso::GaveUp) return quick == Iso::Yes;
  return similar_among(state, obj, candidates, 0xFFFFFFFFU, 0) == Iso::Yes;
}

}  // namespace wsc::detail

namespace wsc {

std::uint64_t refinement_hash(const KnowledgeState& state, ObjectId obj) {
  const auto comp = detail::color_component(state, obj, true);
  return comp.digest(comp.local.at(obj));
}

bool objects_similar(const KnowledgeState& state, ObjectId a, ObjectId b) {
  const auto A = detail::color_component(state, a, true);
  if (auto it = A.local.find(b); it != A.local.end()) {
    return detail::isomorphic_at(state, A, A.local.at(a), A, it->second);
  }
  const auto B = detail::color_component(state, b, true);
  if (A.digest(A.local.at(a)) != B.digest(B.local.at(b))) return false;
  return detail::isomorphic_at(state, A, A.local.at(a), B, B.local.at(b));
}

bool objects_similar_exact(const KnowledgeState& state, ObjectId a, ObjectId b) {
  const auto A = detail::color_component(state, a, false);
  if (auto it = A.local.find(b); it != A.local.end()) {
    return detail::isomorphic_at(state, A, A.local.at(a), A, it->second);
  }
  const auto B = detail::color_component(state, b, false);
  return detail::isomorphic_at(state, A, A.local.at(a), B, B.local.at(b));
}

}  // namespace wsc
