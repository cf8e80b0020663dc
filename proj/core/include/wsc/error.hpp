#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wsc {

enum class ErrorCode {
  // ontology
  CycleInSubtypeGraph,
  UnknownConcept,
  DuplicateName,
  UnknownRelationInRule,
  UndeclaredRuleParameter,
  EmptyRuleEffects,
  // services and requests
  UnknownRelation,
  UnknownParameter,
  InputOutputOverlap,
  PreconditionMentionsOutput,
  EffectBetweenInputs,
  ServiceWithoutContribution,
  WildcardOutsideRule,
  // knowledge and matching
  UnboundParameter,
  UnknownObject,
  PinTargetMissing,
  LimitExceeded,
  // composer / io
  GuardExceeded,
  InvalidConfig,
  SyntaxError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// All library failures are reported through this exception type. `code()`
/// identifies the failure class, `what()` carries a human readable message
/// that includes location context where available (e.g. a JSON pointer).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wsc
