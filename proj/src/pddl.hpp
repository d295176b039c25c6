#pragma once

#include <string>
#include <string_view>

#include "strips.hpp"

namespace sift {

/// Accepts the STRIPS subset with :typing and :negative-preconditions.
/// Every rejection is a ParseError carrying the offending span.
StripsDomain parse_domain(std::string_view text);
StripsInstance parse_instance(std::string_view text, const StripsDomain& domain);

/// Deterministic output: predicates, schemas and literals sorted by name.
std::string emit_domain(const StripsDomain& domain);
std::string emit_instance(const StripsInstance& instance);

}  // namespace sift
