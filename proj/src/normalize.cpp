#include "qac/normalize.hpp"

#include <array>
#include <locale>

namespace qac {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

struct Decoded {
  char32_t cp;
  std::size_t len;
  bool valid;
};

// Decodes one scalar value at `pos`. On failure `len` covers the maximal
// subpart of an ill-formed sequence (at least one byte), so that each such
// subpart maps to exactly one replacement character.
Decoded decode_one(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return {b0, 1, true};

  std::size_t need;
  char32_t cp;
  unsigned char lo = 0x80, hi = 0xBF;
  if (b0 >= 0xC2 && b0 <= 0xDF) {
    need = 1;
    cp = b0 & 0x1F;
  } else if (b0 >= 0xE0 && b0 <= 0xEF) {
    need = 2;
    cp = b0 & 0x0F;
    if (b0 == 0xE0) lo = 0xA0;
    if (b0 == 0xED) hi = 0x9F;  // surrogates
  } else if (b0 >= 0xF0 && b0 <= 0xF4) {
    need = 3;
    cp = b0 & 0x07;
    if (b0 == 0xF0) lo = 0x90;
    if (b0 == 0xF4) hi = 0x8F;
  } else {
    return {kReplacement, 1, false};
  }

  std::size_t i = 1;
  for (; i <= need; ++i) {
    if (pos + i >= s.size()) return {kReplacement, i, false};
    const auto b = static_cast<unsigned char>(s[pos + i]);
    const unsigned char l = i == 1 ? lo : 0x80;
    const unsigned char h = i == 1 ? hi : 0xBF;
    if (b < l || b > h) return {kReplacement, i, false};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, need + 1, true};
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Unicode White_Space plus the remaining C0/C1 controls, which are noise in
// crawled text and would otherwise leak tabs and newlines into suggestions.
bool is_space_like(char32_t cp) {
  if (cp <= 0x20 || (cp >= 0x7F && cp <= 0xA0)) return true;
  switch (cp) {
    case 0x1680: case 0x2028: case 0x2029: case 0x202F: case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

class LowerMap {
 public:
  LowerMap() {
    try {
      locale_ = std::locale("C.UTF-8");
      facet_ = &std::use_facet<std::ctype<wchar_t>>(locale_);
    } catch (const std::runtime_error&) {
      facet_ = nullptr;  // ASCII only
    }
  }

  char32_t operator()(char32_t cp) const {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
    if (!facet_) return cp;
    return static_cast<char32_t>(facet_->tolower(static_cast<wchar_t>(cp)));
  }

 private:
  std::locale locale_;
  const std::ctype<wchar_t>* facet_ = nullptr;
};

const LowerMap& lower_map() {
  static const LowerMap map;
  return map;
}

bool is_separator(char c) {
  switch (c) {
    case '.': case '?': case '!': case '|': case '-': case ';':
      return true;
    default:
      return false;
  }
}

// Shared by normalize() and normalize_live_query().
std::string fold_case_and_space(std::string_view text, bool trim_trailing) {
  const auto& lower = lower_map();
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto d = decode_one(text, pos);
    pos += d.len;
    if (is_space_like(d.cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    append_utf8(out, lower(d.cp));
  }
  if (pending_space && !trim_trailing) out.push_back(' ');
  return out;
}

}  // namespace

std::string sanitize_utf8(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size());
  for (std::size_t pos = 0; pos < bytes.size();) {
    const auto d = decode_one(bytes, pos);
    if (d.valid) {
      out.append(bytes.substr(pos, d.len));
    } else {
      append_utf8(out, kReplacement);
    }
    pos += d.len;
  }
  return out;
}

std::size_t codepoint_count(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::size_t codepoint_prefix_bytes(std::string_view text, std::size_t n) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      if (seen == n) return i;
      ++seen;
    }
  }
  return text.size();
}

std::vector<std::string> split_anchor(std::string_view raw) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
    if (is_separator(raw[i]) && raw[i + 1] == ' ') {
      if (i > start) out.emplace_back(raw.substr(start, i - start));
      start = i + 2;
      ++i;
    }
  }
  if (start < raw.size()) out.emplace_back(raw.substr(start));
  return out;
}

std::string remove_braced(std::string_view raw) {
  static constexpr std::array<std::pair<char, char>, 3> kPairs{
      {{'(', ')'}, {'{', '}'}, {'[', ']'}}};

  std::string out;
  out.reserve(raw.size());
  int active = -1;
  int depth = 0;
  for (char c : raw) {
    if (active >= 0) {
      if (c == kPairs[active].first) {
        ++depth;
      } else if (c == kPairs[active].second && --depth == 0) {
        active = -1;
      }
      continue;
    }
    bool brace = false;
    for (int kind = 0; kind < 3; ++kind) {
      if (c == kPairs[kind].first) {
        active = kind;
        depth = 1;
        brace = true;
      } else if (c == kPairs[kind].second) {
        brace = true;
      }
    }
    if (!brace) out.push_back(c);
  }
  return out;
}

std::string to_lower(std::string_view text) {
  const auto& lower = lower_map();
  std::string out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const auto d = decode_one(text, pos);
    pos += d.len;
    append_utf8(out, lower(d.cp));
  }
  return out;
}

std::optional<std::string> normalize(std::string_view raw) {
  auto out = fold_case_and_space(remove_braced(raw), /*trim_trailing=*/true);
  if (out.empty()) return std::nullopt;
  return out;
}

std::string normalize_live_query(std::string_view raw) {
  return fold_case_and_space(raw, /*trim_trailing=*/false);
}

bool contains_url_substring(std::string_view text) {
  static constexpr std::array<std::string_view, 7> kMarkers{
      "http:", "https:", "www.", ".com", ".net", ".org", ".edu"};
  for (auto marker : kMarkers) {
    if (text.find(marker) != std::string_view::npos) return true;
  }
  return false;
}

}  // namespace qac
