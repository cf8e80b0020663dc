#pragma once

#include <cstddef>
#include <string>

#include "wsc/composer.hpp"

namespace wsc {

struct VerifyResult {
  bool valid = true;
  /// 1-based number of the failing call; calls.size() + 1 means the final
  /// goal check failed. Zero when valid.
  std::size_t step = 0;
  std::string reason;
};

struct VerifyOptions {
  bool injective = false;
  /// Saturate inference rules before every step and before the goal check.
  /// Needed for plans that omit rule applications.
  bool saturate_rules = false;
};

/// Replays the plan from the request's initial knowledge, re-checking
/// every call's binding against types and preconditions, re-applying its
/// effects, and finally re-checking the goal binding. Plan object ids are
/// mapped onto replay ids through the recorded provenance.
VerifyResult verify_plan(const CompositionProblem& problem, const CompositionPlan& plan,
                         const VerifyOptions& options);
VerifyResult verify_plan(const CompositionProblem& problem, const CompositionPlan& plan);

}  // namespace wsc
