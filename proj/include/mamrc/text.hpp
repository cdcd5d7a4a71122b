// Copyright 2026 The mamrc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Text primitives: whitespace tokenization with exact offsets and the
// SQuAD-style answer normalization every metric is defined over.

#ifndef MAMRC_TEXT_HPP_
#define MAMRC_TEXT_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mamrc {

// Half-open range [begin, end). Used for both token and byte ranges.
struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool contains(const Range& o) const { return begin <= o.begin && o.end <= end; }
  bool overlaps(const Range& o) const {
    return !empty() && !o.empty() && begin < o.end && o.begin < end;
  }

  friend bool operator==(const Range&, const Range&) = default;
};

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// ASCII punctuation, i.e. Python's string.punctuation.
inline bool is_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) ||
         (u >= 91 && u <= 96) || (u >= 123 && u <= 126);
}

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = ascii_lower(c);
  return out;
}

// Splits on runs of ASCII whitespace; never yields empty pieces.
inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts,
                        std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Lowercase, strip ASCII punctuation, drop the articles a/an/the, collapse
// whitespace. Non-ASCII bytes pass through untouched. Idempotent.
inline std::string normalize(std::string_view text) {
  std::string stripped;
  stripped.reserve(text.size());
  for (char c : text) {
    if (is_punct(c)) continue;
    stripped.push_back(ascii_lower(c));
  }
  std::string out;
  for (const auto& word : split_ws(stripped)) {
    if (word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

inline std::vector<std::string> normalized_tokens(std::string_view text) {
  return split_ws(normalize(text));
}

// A raw string with its whitespace tokens and their byte offsets.
class TokenizedText {
 public:
  TokenizedText() = default;
  explicit TokenizedText(std::string raw) : raw_(std::move(raw)) {
    std::size_t i = 0;
    while (i < raw_.size()) {
      while (i < raw_.size() && is_space(raw_[i])) ++i;
      const std::size_t start = i;
      while (i < raw_.size() && !is_space(raw_[i])) ++i;
      if (i > start) {
        offsets_.push_back({start, i});
        tokens_.push_back(raw_.substr(start, i - start));
      }
    }
  }

  const std::string& raw() const { return raw_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<Range>& offsets() const { return offsets_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  // Raw text covered by a token range, from the first token's start byte to
  // the last token's end byte. Interior whitespace is preserved.
  std::string slice(Range tokens) const {
    if (tokens.empty() || tokens.end > size()) return {};
    const auto b = offsets_[tokens.begin].begin;
    const auto e = offsets_[tokens.end - 1].end;
    return raw_.substr(b, e - b);
  }

  // Byte range covered by a token range.
  Range byte_range(Range tokens) const {
    if (tokens.empty() || tokens.end > size()) return {};
    return {offsets_[tokens.begin].begin, offsets_[tokens.end - 1].end};
  }

  // Smallest token range covering the byte range, if the byte range touches
  // at least one token.
  bool token_range_for(Range bytes, Range* out) const {
    std::size_t first = size(), last = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (offsets_[i].end > bytes.begin && offsets_[i].begin < bytes.end) {
        if (first == size()) first = i;
        last = i + 1;
      }
    }
    if (first == size()) return false;
    *out = {first, last};
    return true;
  }

  friend bool operator==(const TokenizedText& a, const TokenizedText& b) {
    return a.raw_ == b.raw_;
  }

 private:
  std::string raw_;
  std::vector<std::string> tokens_;
  std::vector<Range> offsets_;
};

inline TokenizedText tokenize(std::string raw) {
  return TokenizedText(std::move(raw));
}

// UTF-8 code point <-> byte offset conversion. External formats count code
// points (Python str indices); internal ranges are bytes.
namespace utf8 {

inline bool is_continuation(char c) {
  return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

inline std::size_t byte_offset(std::string_view s, std::size_t codepoint) {
  std::size_t cp = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (is_continuation(s[i])) continue;
    if (cp == codepoint) return i;
    ++cp;
  }
  return s.size();
}

inline std::size_t codepoint_offset(std::string_view s, std::size_t byte) {
  std::size_t cp = 0;
  for (std::size_t i = 0; i < s.size() && i < byte; ++i)
    if (!is_continuation(s[i])) ++cp;
  return cp;
}

}  // namespace utf8

}  // namespace mamrc

#endif  // MAMRC_TEXT_HPP_
