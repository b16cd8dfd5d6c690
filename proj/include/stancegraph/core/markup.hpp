#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stancegraph::markup {

/// Decodes the five XML entities, `&nbsp;` and numeric character references.
/// Unknown entities are left as they are.
std::string decode_entities(std::string_view s);

/// Escapes &, <, > and double quotes.
std::string escape(std::string_view s);

/// Raw inner text of every `<tag>` or `<tag attr=...>` element, in document
/// order. Elements of the same name must not nest; an unterminated element
/// ends the scan.
std::vector<std::string_view> elements(std::string_view s, std::string_view tag);

/// Decoded, whitespace-normalized inner text of the first element, or empty.
std::string first_text(std::string_view s, std::string_view tag);

}  // namespace stancegraph::markup
