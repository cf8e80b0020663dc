#include "wsc/error.hpp"

namespace wsc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::CycleInSubtypeGraph: return "CycleInSubtypeGraph";
    case ErrorCode::UnknownConcept: return "UnknownConcept";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::UnknownRelationInRule: return "UnknownRelationInRule";
    case ErrorCode::UndeclaredRuleParameter: return "UndeclaredRuleParameter";
    case ErrorCode::EmptyRuleEffects: return "EmptyRuleEffects";
    case ErrorCode::UnknownRelation: return "UnknownRelation";
    case ErrorCode::UnknownParameter: return "UnknownParameter";
    case ErrorCode::InputOutputOverlap: return "InputOutputOverlap";
    case ErrorCode::PreconditionMentionsOutput: return "PreconditionMentionsOutput";
    case ErrorCode::EffectBetweenInputs: return "EffectBetweenInputs";
    case ErrorCode::ServiceWithoutContribution: return "ServiceWithoutContribution";
    case ErrorCode::WildcardOutsideRule: return "WildcardOutsideRule";
    case ErrorCode::UnboundParameter: return "UnboundParameter";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::PinTargetMissing: return "PinTargetMissing";
    case ErrorCode::LimitExceeded: return "LimitExceeded";
    case ErrorCode::GuardExceeded: return "GuardExceeded";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SyntaxError: return "SyntaxError";
  }
  return "Unknown";
}

}  // namespace wsc
