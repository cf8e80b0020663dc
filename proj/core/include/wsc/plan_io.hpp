#pragma once

#include <string>
#include <string_view>

#include "wsc/composer.hpp"

namespace wsc {

/// Canonical plan document: sorted keys and bindings, so equal plans
/// serialize to identical bytes.
std::string serialize_plan(const Ontology& ontology, const CompositionPlan& plan,
                           const ComposerConfig& config);

/// Small status document emitted when composition fails.
std::string serialize_not_solved(const NotSolved& result, const ComposerConfig& config);

/// Reads a plan document back. Concept and relation names are resolved
/// against `ontology`; bindings come back ordered by parameter name.
CompositionPlan parse_plan(std::string_view text, const Ontology& ontology);

}  // namespace wsc
