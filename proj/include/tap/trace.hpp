#pragma once

#include <string>
#include <string_view>

#include "tap/solver.hpp"

namespace tap {

// JSON form of a cover run: ordered steps with their rule, link endpoint
// pairs and credit movements, plus the credit units.
std::string trace_to_json(const CoverResult& result, int indent = 2);

// Throws ParseError on malformed input.
CoverTrace parse_trace(std::string_view text);

}  // namespace tap
