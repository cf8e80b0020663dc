#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wsc/knowledge.hpp"
#include "wsc/matcher.hpp"
#include "wsc/ontology.hpp"
#include "wsc/service.hpp"

namespace wsc {

struct CompositionProblem {
  Ontology ontology;
  Repository repository;
  Request request;
};

/// Cross-validates repository and request against the ontology.
void validate_problem(const CompositionProblem& problem);

/// Rule-derived virtual services, in effective rule order.
std::vector<Service> rule_services(const Ontology& ontology);

/// Looks a step up by name: plain services for `virtual_step == false`,
/// rule-derived services otherwise. Returns nullopt when absent.
std::optional<Service> find_step_service(const CompositionProblem& problem, const std::string& name,
                                         bool virtual_step);

using NamedBinding = std::vector<std::pair<std::string, ObjectId>>;

struct ServiceCall {
  std::size_t index = 0;
  std::string service;
  bool is_virtual = false;  // rule application
  NamedBinding binding;     // input param -> object, in input order
  NamedBinding produced;    // output param -> new object, in output order
  std::vector<RelationEdge> added_edges;

  friend bool operator==(const ServiceCall&, const ServiceCall&) = default;
};

struct CompositionPlan {
  std::vector<ServiceCall> calls;
  NamedBinding goal_binding;
  /// Every object the plan mentions: request objects first, then produced.
  std::vector<ObjectInstance> objects;
  std::size_t iterations = 0;
  bool rule_calls_included = true;

  friend bool operator==(const CompositionPlan&, const CompositionPlan&) = default;
};

struct ComposerConfig {
  std::size_t max_iterations = 100;
  std::size_t max_objects = 10000;
  bool injective = false;
  bool matcher_pruning = true;
  bool include_rule_calls = true;
};

enum class NotSolvedReason { NoProgress, IterationBound, ObjectBound };

std::string_view to_string(NotSolvedReason reason) noexcept;

struct NotSolved {
  NotSolvedReason reason = NotSolvedReason::NoProgress;
  std::size_t iterations = 0;
  std::size_t objects = 0;
};

using ComposeResult = std::variant<CompositionPlan, NotSolved>;

/// Forward chaining: each sweep walks the plain services in repository
/// order and then the rule-derived services, executes every possible call
/// that adds information, and stops once the goal matches, a sweep changes
/// nothing, or a bound trips. Throws InvalidConfig for zero bounds.
ComposeResult compose(const CompositionProblem& problem, const ComposerConfig& config = {});

/// Whether executing the call would add information: some produced object
/// has no similar pre-existing object of the same concept, or some effect
/// edge between pre-existing objects is absent.
bool provides_useful_information(const Ontology& ontology, const KnowledgeState& state,
                                 const Service& service, const Binding& binding);

/// Goal check: one binding of the request's goal service, or nullopt.
/// `provided` are the request's objects in provided order (pins).
std::optional<Binding> can_answer_query(const Ontology& ontology, const KnowledgeState& state,
                                        const Request& request, std::span<const ObjectId> provided,
                                        bool injective = false);

/// Drops rule applications from a plan. Such plans verify only in the
/// rule-saturating replay mode.
CompositionPlan without_rule_calls(CompositionPlan plan);

/// Keeps only the calls the goal binding transitively depends on, then
/// replays them so ids and recorded edges are consistent again.
CompositionPlan prune_plan(const CompositionPlan& plan, const CompositionProblem& problem);

struct BruteForceResult {
  bool solvable = false;
  std::size_t depth = 0;  // minimal number of calls when solvable, else the searched bound
};

/// Exhaustive breadth-first search over call sequences (rules included)
/// for the minimal number of calls answering the request. Call sequences
/// are explored as sets since knowledge only grows, and an identical call
/// (same service on the same objects) is never repeated. Throws
/// GuardExceeded beyond 8 services, depth 6, or `node_budget` states.
BruteForceResult brute_force_compose(const CompositionProblem& problem, std::size_t max_depth,
                                     std::size_t node_budget = 2'000'000);

}  // namespace wsc
