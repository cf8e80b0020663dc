#pragma once

#include <string>
#include <string_view>

#include "wsc/composer.hpp"

namespace wsc {

/// Parses and fully validates an instance document (JSON with `ontology`,
/// `repository` and `query` sections). Syntax errors carry line and column;
/// validation errors carry a JSON pointer to the offending element.
CompositionProblem parse_instance(std::string_view text);

/// Canonical JSON rendering of a problem; parse_instance accepts it back.
std::string serialize_instance(const CompositionProblem& problem);

/// Reads a whole file; throws SyntaxError when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace wsc
