// Category lexicons and tweet tokenization.
//
// A lexicon file groups word patterns under bracketed category headers:
//
//   [tentat]
//   maybe
//   perhaps
//   nervous*        <- trailing '*' makes a prefix stem
//
// Tokenization removes URLs, hashtag and mention tokens, then strips
// punctuation/symbol code points, lowercases, and splits on whitespace.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "spreader/punct_ranges.hpp"

namespace spreader {

struct TokenList {
  std::vector<std::string> tokens;

  bool empty() const { return tokens.empty(); }
  std::size_t size() const { return tokens.size(); }
};

// One lexicon category: the ordered pattern list as written, plus a
// compiled form (exact-match set and stripped prefix stems) used for
// matching. Both views describe the same pattern set.
struct Category {
  std::string name;
  std::vector<std::string> patterns;

  std::unordered_set<std::string> literals;
  std::vector<std::string> stems;

  void compile() {
    literals.clear();
    stems.clear();
    for (const auto& p : patterns) {
      if (!p.empty() && p.back() == '*') {
        stems.push_back(p.substr(0, p.size() - 1));
      } else {
        literals.insert(p);
      }
    }
  }

  bool matches(const std::string& token) const {
    if (literals.count(token) != 0) return true;
    for (const auto& s : stems) {
      if (token.compare(0, s.size(), s) == 0) return true;
    }
    return false;
  }
};

class CategoryLexicon {
 public:
  void add_category(Category cat) {
    if (index_.count(cat.name) != 0) {
      throw std::runtime_error("duplicate lexicon category: [" + cat.name + "]");
    }
    cat.compile();
    index_[cat.name] = categories_.size();
    categories_.push_back(std::move(cat));
  }

  const Category* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &categories_[it->second];
  }

  const Category& require(const std::string& name) const {
    const Category* c = find(name);
    if (c == nullptr) throw std::runtime_error("unknown lexicon category: " + name);
    return *c;
  }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  const std::vector<Category>& categories() const { return categories_; }

 private:
  std::vector<Category> categories_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

inline bool iequals_prefix(std::string_view s, size_t pos, std::string_view lit) {
  if (pos + lit.size() > s.size()) return false;
  for (size_t i = 0; i < lit.size(); ++i) {
    if (ascii_lower(s[pos + i]) != lit[i]) return false;
  }
  return true;
}

// Decodes one UTF-8 code point at s[i]; advances i. Bytes that do not form
// a valid sequence are passed through one at a time.
inline char32_t decode_utf8(std::string_view s, size_t& i) {
  const unsigned char c0 = static_cast<unsigned char>(s[i]);
  if (c0 < 0x80) {
    ++i;
    return c0;
  }
  size_t len = 0;
  char32_t cp = 0;
  if ((c0 & 0xE0) == 0xC0) {
    len = 2;
    cp = c0 & 0x1F;
  } else if ((c0 & 0xF0) == 0xE0) {
    len = 3;
    cp = c0 & 0x0F;
  } else if ((c0 & 0xF8) == 0xF0) {
    len = 4;
    cp = c0 & 0x07;
  } else {
    ++i;
    return c0;
  }
  if (i + len > s.size()) {
    ++i;
    return c0;
  }
  for (size_t k = 1; k < len; ++k) {
    const unsigned char ck = static_cast<unsigned char>(s[i + k]);
    if ((ck & 0xC0) != 0x80) {
      ++i;
      return c0;
    }
    cp = (cp << 6) | (ck & 0x3F);
  }
  i += len;
  return cp;
}

inline void encode_utf8(char32_t cp, std::string& out) {
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

// Deletes "http://..." / "https://..." runs up to the next whitespace.
inline std::string strip_urls(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    if (iequals_prefix(text, i, "http://") || iequals_prefix(text, i, "https://")) {
      while (i < text.size() && !is_ascii_space(text[i])) ++i;
      continue;
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

}  // namespace detail

inline bool match_pattern(const std::string& token, const std::string& pattern) {
  if (!pattern.empty() && pattern.back() == '*') {
    return token.compare(0, pattern.size() - 1, pattern, 0, pattern.size() - 1) == 0;
  }
  return token == pattern;
}

// Preprocessing order matters: URL runs are deleted first, then hashtag,
// mention, and bare "www." tokens are dropped whole, then punctuation and
// symbol code points are stripped from what remains.
inline TokenList tokenize(std::string_view text) {
  using namespace detail;
  const std::string cleaned = strip_urls(text);

  TokenList out;
  size_t i = 0;
  const size_t n = cleaned.size();
  while (i < n) {
    while (i < n && is_ascii_space(cleaned[i])) ++i;
    if (i >= n) break;
    const size_t start = i;
    while (i < n && !is_ascii_space(cleaned[i])) ++i;
    const std::string_view span(cleaned.data() + start, i - start);

    if (span[0] == '#' || span[0] == '@') continue;
    if (iequals_prefix(span, 0, "www.")) continue;

    std::string token;
    token.reserve(span.size());
    size_t k = 0;
    while (k < span.size()) {
      const char32_t cp = decode_utf8(span, k);
      if (is_punct_or_symbol(cp)) continue;
      if (cp >= 'A' && cp <= 'Z') {
        token.push_back(static_cast<char>(cp - 'A' + 'a'));
      } else {
        encode_utf8(cp, token);
      }
    }
    if (!token.empty()) out.tokens.push_back(std::move(token));
  }
  return out;
}

// Parses the lexicon text format. Bracketed lines open categories, '#'
// lines are comments, anything else is a pattern for the open category.
// Category names and patterns are lowercased; duplicate patterns within a
// category collapse to the first occurrence.
inline CategoryLexicon parse_lexicon(std::string_view text) {
  CategoryLexicon lex;
  Category current;
  bool open = false;
  std::unordered_set<std::string> seen;
  size_t line_no = 0;

  auto flush = [&]() {
    if (open) lex.add_category(std::move(current));
    current = Category{};
    seen.clear();
  };

  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    size_t b = 0, e = raw.size();
    while (b < e && detail::is_ascii_space(raw[b])) ++b;
    while (e > b && detail::is_ascii_space(raw[e - 1])) --e;
    if (b == e) continue;
    std::string_view line = raw.substr(b, e - b);
    if (line[0] == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                                 ": malformed category header '" + std::string(line) + "'");
      }
      flush();
      std::string name(line.substr(1, line.size() - 2));
      for (char& c : name) c = detail::ascii_lower(c);
      name = [&] {
        size_t nb = 0, ne = name.size();
        while (nb < ne && detail::is_ascii_space(name[nb])) ++nb;
        while (ne > nb && detail::is_ascii_space(name[ne - 1])) --ne;
        return name.substr(nb, ne - nb);
      }();
      if (name.empty()) {
        throw std::runtime_error("lexicon line " + std::to_string(line_no) + ": empty category name");
      }
      current.name = name;
      open = true;
      continue;
    }

    if (!open) {
      throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                               ": pattern before any category header");
    }
    std::string pat(line);
    for (char& c : pat) c = detail::ascii_lower(c);
    for (size_t k = 0; k + 1 < pat.size(); ++k) {
      if (pat[k] == '*') {
        throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                                 ": '*' allowed only as final character in '" + pat + "'");
      }
    }
    if (seen.insert(pat).second) current.patterns.push_back(std::move(pat));
  }
  flush();
  return lex;
}

// Percentage of tokens matching any pattern of the category. A token
// matching several patterns still counts once. Empty input rates 0.
inline double category_rate(const TokenList& tokens, const CategoryLexicon& lexicon,
                            const std::string& category) {
  const Category& cat = lexicon.require(category);
  if (tokens.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& tok : tokens.tokens) {
    if (cat.matches(tok)) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(tokens.size());
}

}  // namespace spreader
