#pragma once

// JSON-value level access to the record schema, shared by the dataset readers.

#include <nlohmann/json.hpp>

#include "tsdiff/schema.hpp"

namespace tsdiff::detail {

using Json = nlohmann::ordered_json;

/// Throws ParseError(Schema) naming the record index and field.
ExplanationList list_from_json(const Json& j, ParseMode mode, std::optional<int> length);

/// Turns a nlohmann parse_error into a ParseError with 1-based line/column in `text`.
ParseError syntax_error(const nlohmann::json::parse_error& e, std::string_view text);

}  // namespace tsdiff::detail
