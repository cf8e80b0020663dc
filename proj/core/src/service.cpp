#include "wsc/service.hpp"

#include <algorithm>
#include <unordered_set>

#include "wsc/error.hpp"

namespace wsc {

namespace {

std::optional<std::size_t> index_of(const std::vector<ParameterDecl>& params,
                                    const std::string& name) {
  auto it = std::find_if(params.begin(), params.end(),
                         [&](const ParameterDecl& p) { return p.name == name; });
  if (it == params.end()) return std::nullopt;
  return static_cast<std::size_t>(it - params.begin());
}

void check_params(const Ontology& ontology, const std::string& owner,
                  const std::vector<ParameterDecl>& params, bool allow_any,
                  std::unordered_set<std::string>& names) {
  for (const auto& p : params) {
    if (p.name.empty()) throw Error(ErrorCode::UnknownParameter, owner + " has an unnamed parameter");
    if (!names.insert(p.name).second) {
      throw Error(ErrorCode::InputOutputOverlap, owner + " declares parameter '" + p.name + "' twice");
    }
    if (p.is_any()) {
      if (!allow_any) {
        throw Error(ErrorCode::WildcardOutsideRule, owner + " parameter '" + p.name + "' is untyped");
      }
    } else if (!ontology.find_concept(*p.type)) {
      throw Error(ErrorCode::UnknownConcept,
                  owner + " parameter '" + p.name + "' has type '" + *p.type + "'");
    }
  }
}

void check_atom(const Ontology& ontology, const std::string& owner, const RelationAtom& atom,
                const std::unordered_set<std::string>& declared) {
  if (!ontology.find_relation(atom.relation)) {
    throw Error(ErrorCode::UnknownRelation, owner + " uses relation '" + atom.relation + "'");
  }
  for (const auto* param : {&atom.from, &atom.to}) {
    if (!declared.contains(*param)) {
      throw Error(ErrorCode::UnknownParameter,
                  owner + " atom " + atom.relation + "(" + atom.from + "," + atom.to +
                      ") mentions undeclared '" + *param + "'");
    }
  }
}

std::string atom_text(const RelationAtom& a) { return a.relation + "(" + a.from + "," + a.to + ")"; }

}  // namespace

std::optional<std::size_t> Service::input_index(const std::string& param) const {
  return index_of(inputs, param);
}

std::optional<std::size_t> Service::output_index(const std::string& param) const {
  return index_of(outputs, param);
}

const Service* Repository::find(const std::string& name) const {
  auto it = std::find_if(services.begin(), services.end(),
                         [&](const Service& s) { return s.name == name; });
  return it == services.end() ? nullptr : &*it;
}

void validate_service(const Ontology& ontology, const Service& service) {
  const std::string owner = "service '" + service.name + "'";
  const bool from_rule = service.kind == ServiceKind::FromRule;

  std::unordered_set<std::string> in_names;
  check_params(ontology, owner, service.inputs, from_rule, in_names);
  std::unordered_set<std::string> out_names;
  check_params(ontology, owner, service.outputs, from_rule, out_names);
  for (const auto& name : out_names) {
    if (in_names.contains(name)) {
      throw Error(ErrorCode::InputOutputOverlap,
                  owner + " uses '" + name + "' as both input and output");
    }
  }
  std::unordered_set<std::string> all = in_names;
  all.insert(out_names.begin(), out_names.end());

  for (const auto& atom : service.preconditions) {
    check_atom(ontology, owner, atom, all);
    if (!in_names.contains(atom.from) || !in_names.contains(atom.to)) {
      throw Error(ErrorCode::PreconditionMentionsOutput,
                  owner + " precondition " + atom_text(atom) + " mentions an output");
    }
  }
  for (const auto& atom : service.effects) {
    check_atom(ontology, owner, atom, all);
    if (service.kind == ServiceKind::Plain && in_names.contains(atom.from) &&
        in_names.contains(atom.to)) {
      throw Error(ErrorCode::EffectBetweenInputs,
                  owner + " effect " + atom_text(atom) + " relates two inputs");
    }
  }
  if (service.kind == ServiceKind::Plain && service.outputs.empty() && service.effects.empty()) {
    throw Error(ErrorCode::ServiceWithoutContribution, owner + " has neither outputs nor effects");
  }
}

void validate_request(const Ontology& ontology, const Request& request) {
  const std::string owner = "request '" + request.name + "'";
  std::unordered_set<std::string> provided;
  check_params(ontology, owner, request.provided, false, provided);
  std::unordered_set<std::string> wanted;
  check_params(ontology, owner, request.wanted, false, wanted);
  for (const auto& name : wanted) {
    if (provided.contains(name)) {
      throw Error(ErrorCode::InputOutputOverlap,
                  owner + " uses '" + name + "' as both provided and wanted");
    }
  }
  for (const auto& atom : request.provided_relations) check_atom(ontology, owner, atom, provided);
  std::unordered_set<std::string> all = provided;
  all.insert(wanted.begin(), wanted.end());
  for (const auto& atom : request.wanted_relations) check_atom(ontology, owner, atom, all);
}

void validate_repository(const Ontology& ontology, const Repository& repository) {
  std::unordered_set<std::string> names;
  for (const auto& s : repository.services) {
    if (s.kind != ServiceKind::Plain) {
      throw Error(ErrorCode::InvalidConfig, "repository service '" + s.name + "' is virtual");
    }
    if (!names.insert(s.name).second) {
      throw Error(ErrorCode::DuplicateName, "service '" + s.name + "' declared twice");
    }
    validate_service(ontology, s);
  }
}

Service rule_as_virtual_service(const InferenceRule& rule) {
  Service s;
  s.name = rule.name;
  s.kind = ServiceKind::FromRule;
  s.inputs.reserve(rule.parameters.size());
  for (const auto& p : rule.parameters) s.inputs.push_back(ParameterDecl{p, std::nullopt});
  s.preconditions = rule.preconditions;
  s.effects = rule.effects;
  return s;
}

GoalService request_as_goal_service(const Request& request) {
  GoalService goal;
  goal.service.name = request.name;
  goal.service.kind = ServiceKind::Goal;
  goal.service.inputs = request.wanted;
  goal.service.preconditions = request.wanted_relations;
  for (const auto& p : request.provided) {
    bool referenced = std::any_of(
        request.wanted_relations.begin(), request.wanted_relations.end(),
        [&](const RelationAtom& a) { return a.from == p.name || a.to == p.name; });
    if (referenced) {
      goal.service.inputs.push_back(p);
      goal.pinned.push_back(p.name);
    }
  }
  return goal;
}

}  // namespace wsc
