#include "wsc/generator.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "wsc/error.hpp"

namespace wsc {

namespace {

constexpr const char* kDerived = "derived";
constexpr const char* kAnswers = "answers";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

void check_generator_params(const GeneratorParams& p) {
  auto guard = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::GuardExceeded, what);
  };
  guard(p.depth >= 3 && p.depth <= 64, "depth must be in [3, 64]");
  guard(p.concepts >= p.depth && p.concepts <= 100000, "concepts must be in [depth, 100000]");
  guard(p.subtype_edges <= p.concepts * (p.concepts - 1) / 2, "too many subtype edges");
  guard(p.relations >= 3 && p.relations <= 10000, "relations must be in [3, 10000]");
  guard(p.rules >= 1 && p.rules <= 10000, "rules must be in [1, 10000]");
  guard(p.services >= p.depth - 1 && p.services <= 100000, "services must be in [depth - 1, 100000]");
  guard(p.min_arity >= 1 && p.min_arity <= p.max_arity && p.max_arity <= 6,
        "arity bounds must satisfy 1 <= min <= max <= 6");
}

CompositionProblem generate_instance(const GeneratorParams& p) {
  check_generator_params(p);
  Rng rng(p.seed);

  std::vector<std::string> concepts;
  for (std::size_t i = 0; i < p.concepts; ++i) concepts.push_back("c" + std::to_string(i));

  // Edges always point from a higher to a lower index, so the graph is a DAG.
  std::set<std::pair<std::size_t, std::size_t>> edge_set;
  while (edge_set.size() < p.subtype_edges) {
    std::size_t a = rng.below(p.concepts);
    std::size_t b = rng.below(p.concepts);
    if (a == b) continue;
    edge_set.emplace(std::max(a, b), std::min(a, b));
  }
  std::vector<SubtypeEdge> edges;
  for (const auto& [sub, super] : edge_set) edges.push_back({concepts[sub], concepts[super]});

  std::vector<RelationDef> relations{{kDerived, false, false}, {kAnswers, false, false}};
  std::vector<std::string> generic;
  for (std::size_t i = 0; i + 2 < p.relations; ++i) {
    RelationDef r{"r" + std::to_string(i), rng.chance(0.15), rng.chance(0.1)};
    generic.push_back(r.name);
    relations.push_back(r);
  }
  auto any_generic = [&] { return generic[rng.below(generic.size())]; };

  const Ontology taxonomy = Ontology::build(concepts, edges, relations, {});
  auto ancestor = [&](std::size_t c) {
    auto sup = taxonomy.supertypes(static_cast<ConceptIdx>(c));
    return concepts[sup[rng.below(sup.size())]];
  };

  // Planted chain: start -S1-> o1 -S2-> ... -Sk-> ok, with one rule step.
  const std::size_t k = p.depth - 1;
  std::vector<std::size_t> pool(p.concepts);
  for (std::size_t i = 0; i < p.concepts; ++i) pool[i] = i;
  rng.shuffle(pool);
  const std::vector<std::size_t> chain(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k + 1));
  std::vector<std::string> link(k + 1);
  for (std::size_t i = 1; i <= k; ++i) link[i] = any_generic();

  const std::size_t rule_at = rng.between(1, k - 1);
  const bool two_step = rule_at >= 2 && rng.chance(0.5);
  InferenceRule planted;
  planted.name = "infer0";
  if (two_step) {
    planted.parameters = {"X", "Y", "Z"};
    planted.preconditions = {{link[rule_at - 1], "X", "Y"}, {link[rule_at], "Y", "Z"}};
    planted.effects = {{kDerived, "X", "Z"}};
  } else {
    planted.parameters = {"X", "Y"};
    planted.preconditions = {{link[rule_at], "X", "Y"}};
    planted.effects = {{kDerived, "X", "Y"}};
  }
  std::vector<InferenceRule> rules{planted};
  for (std::size_t i = 1; i < p.rules; ++i) {
    InferenceRule r;
    r.name = "infer" + std::to_string(i);
    r.parameters = {"X", "Y"};
    r.preconditions = {{any_generic(), "X", "Y"}};
    r.effects = {rng.chance(0.5) ? RelationAtom{any_generic(), "Y", "X"} : RelationAtom{any_generic(), "X", "Y"}};
    rules.push_back(std::move(r));
  }

  std::vector<Service> services;
  for (std::size_t i = 1; i <= k; ++i) {
    Service s;
    s.inputs.push_back({"a", ancestor(chain[i - 1])});
    s.outputs.push_back({"b", concepts[chain[i]]});
    s.effects.push_back({link[i], "a", "b"});
    if (i == rule_at + 1) {
      s.inputs.push_back({"u", ancestor(chain[two_step ? rule_at - 2 : rule_at - 1])});
      s.preconditions.push_back({kDerived, "u", "a"});
    }
    if (i == k) {
      s.inputs.push_back({"s", ancestor(chain[0])});
      s.effects.push_back({p.solvable ? std::string(kAnswers) : any_generic(), "s", "b"});
    }
    services.push_back(std::move(s));
  }
  for (std::size_t d = k; d < p.services; ++d) {
    Service s;
    const std::size_t arity = rng.between(p.min_arity, p.max_arity);
    for (std::size_t i = 0; i < arity; ++i) {
      s.inputs.push_back({"in" + std::to_string(i), concepts[rng.below(p.concepts)]});
    }
    s.outputs.push_back({"out", concepts[rng.below(p.concepts)]});
    if (arity >= 2 && rng.chance(0.5)) s.preconditions.push_back({any_generic(), "in0", "in1"});
    if (rng.chance(0.5)) {
      s.effects.push_back({any_generic(), "in" + std::to_string(rng.below(arity)), "out"});
    }
    services.push_back(std::move(s));
  }
  rng.shuffle(services);
  for (std::size_t i = 0; i < services.size(); ++i) services[i].name = "s" + std::to_string(i);

  const std::string goal_type = ancestor(chain[k]);
  CompositionProblem problem;
  problem.ontology = Ontology::build(std::move(concepts), std::move(edges), std::move(relations), std::move(rules));
  problem.repository.services = std::move(services);

  Request& q = problem.request;
  q.name = "query";
  q.provided.push_back({"start", problem.ontology.concept_name(static_cast<ConceptIdx>(chain[0]))});
  if (rng.chance(0.5)) {
    q.provided.push_back({"extra", problem.ontology.concept_name(static_cast<ConceptIdx>(rng.below(p.concepts)))});
    if (rng.chance(0.5)) q.provided_relations.push_back({any_generic(), "start", "extra"});
  }
  q.wanted.push_back({"goal", goal_type});
  q.wanted_relations.push_back({kAnswers, "start", "goal"});

  validate_problem(problem);
  return problem;
}

}  // namespace wsc
