#pragma once

#include <cstddef>
#include <cstdint>

#include "wsc/composer.hpp"

namespace wsc {

/// Knobs for the random instance generator. Generated instances plant a
/// solution chain of `depth` calls: `depth - 1` services plus one rule
/// application the chain cannot do without. Remaining services and rules
/// are distractors.
struct GeneratorParams {
  std::size_t concepts = 12;
  std::size_t subtype_edges = 8;
  std::size_t relations = 5;  // includes the two reserved ones (derived, answers)
  std::size_t rules = 2;      // includes the planted rule
  std::size_t services = 6;   // includes the chain services
  std::size_t depth = 3;      // planted calls, rule application included
  std::size_t min_arity = 1;
  std::size_t max_arity = 2;
  bool solvable = true;
  std::uint64_t seed = 42;
};

/// Throws GuardExceeded when the counts are inconsistent or too large.
void check_generator_params(const GeneratorParams& params);

/// Deterministic in `params` (including the seed). With solvable=false the
/// goal relation is asserted by no service effect and no rule.
CompositionProblem generate_instance(const GeneratorParams& params);

}  // namespace wsc
