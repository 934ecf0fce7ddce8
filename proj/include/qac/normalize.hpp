#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qac {

// Text cleaning shared by the anchor and query-log paths.
//
// All functions take and return UTF-8. Inputs that came from outside the
// process should go through sanitize_utf8() first; everything else here
// assumes well-formed UTF-8.

/// Replaces every ill-formed UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

/// Number of Unicode scalar values in well-formed UTF-8 text.
std::size_t codepoint_count(std::string_view text);

/// Byte length of the first `n` scalar values (whole string if shorter).
std::size_t codepoint_prefix_bytes(std::string_view text, std::size_t n);

/// Splits at each of `. ? ! | - ;` immediately followed by a space. The
/// separator and the space are consumed; empty fragments are dropped.
std::vector<std::string> split_anchor(std::string_view raw);

/// Deletes text enclosed in (), {} or [] together with the braces. Each kind
/// tracks its own nesting depth. An unmatched opener deletes to the end of
/// the string, an unmatched closer is deleted alone.
std::string remove_braced(std::string_view raw);

/// Simple lowercase mapping, code point by code point.
std::string to_lower(std::string_view text);

/// remove_braced + lowercase + whitespace collapse + trim. Empty results
/// come back as nullopt.
std::optional<std::string> normalize(std::string_view raw);

/// Normalization for prefixes typed by a live user: lowercase and collapse
/// whitespace runs, trim leading whitespace only. A trailing space is kept
/// because it is a meaningful part of a character prefix ("new ").
std::string normalize_live_query(std::string_view raw);

/// True iff `text` contains one of http: https: www. .com .net .org .edu.
bool contains_url_substring(std::string_view text);

}  // namespace qac
