#pragma once

#include "dataspace/value.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace dataspace {

/// Raised when text or JSON does not describe a term.
class malformed_text : public error {
public:
  using error::error;
};

// Canonical text form shared with the trace format:
//
// - integers and booleans are JSON scalars
// - symbols are JSON strings prefixed with `'`
// - strings are plain JSON strings; a string that would read back as
//   something else (`"_"`, `"?!"`, or a leading `'` or `\`) gets a leading `\`
// - records are arrays `[label, field...]`
// - the wildcard is `"_"` and `capture(p)` is `["?!", p]`
//
// Binders have no text form.

nlohmann::ordered_json to_json(const term& t);

term from_json(const nlohmann::ordered_json& j);

/// Compact canonical encoding, e.g. `["account",70]`.
std::string canonical_encode(const term& t);

/// Inverse of `canonical_encode`. Throws `malformed_text`.
term canonical_decode(std::string_view text);

} // namespace dataspace
