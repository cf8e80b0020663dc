#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wsc/ontology.hpp"

namespace wsc {

/// A named, typed service parameter. An unset `type` is the wildcard
/// ANY, only legal on services compiled from inference rules.
struct ParameterDecl {
  std::string name;
  std::optional<std::string> type;

  bool is_any() const noexcept { return !type.has_value(); }

  friend bool operator==(const ParameterDecl&, const ParameterDecl&) = default;
};

enum class ServiceKind { Plain, FromRule, Goal };

struct Service {
  std::string name;
  std::vector<ParameterDecl> inputs;
  std::vector<ParameterDecl> outputs;
  std::vector<RelationAtom> preconditions;  // over inputs only
  std::vector<RelationAtom> effects;        // over inputs and outputs
  ServiceKind kind = ServiceKind::Plain;

  bool is_virtual() const noexcept { return kind != ServiceKind::Plain; }
  /// Index of the named input, or nullopt.
  std::optional<std::size_t> input_index(const std::string& param) const;
  std::optional<std::size_t> output_index(const std::string& param) const;

  friend bool operator==(const Service&, const Service&) = default;
};

/// A user request: what is known (provided parameters and relations) and
/// what is wanted (parameters plus relations that may also refer back to
/// provided parameters).
struct Request {
  std::string name;
  std::vector<ParameterDecl> provided;
  std::vector<RelationAtom> provided_relations;
  std::vector<ParameterDecl> wanted;
  std::vector<RelationAtom> wanted_relations;

  friend bool operator==(const Request&, const Request&) = default;
};

struct Repository {
  std::vector<Service> services;

  const Service* find(const std::string& name) const;

  friend bool operator==(const Repository&, const Repository&) = default;
};

/// The request compiled to a virtual service. Inputs are the wanted
/// parameters followed by every provided parameter that a wanted relation
/// mentions; the latter are listed in `pinned` and must be matched to the
/// object the request itself introduced.
struct GoalService {
  Service service;
  std::vector<std::string> pinned;
};

void validate_service(const Ontology& ontology, const Service& service);
void validate_request(const Ontology& ontology, const Request& request);
/// Validates every service and checks name uniqueness.
void validate_repository(const Ontology& ontology, const Repository& repository);

Service rule_as_virtual_service(const InferenceRule& rule);
GoalService request_as_goal_service(const Request& request);

}  // namespace wsc
