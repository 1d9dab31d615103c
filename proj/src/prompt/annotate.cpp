// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/prompt/annotate.hpp"

#include <cctype>

namespace stone_needle::prompt {

bool is_word_byte(char c) noexcept {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) || c == '_';
}

std::vector<EntityAnnotation> annotate_entities(std::string_view text, const KnowledgeBase& kb) {
  std::vector<EntityAnnotation> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    bool at_word_start = pos == 0 || !is_word_byte(text[pos - 1]);
    auto match = at_word_start ? kb.longest_match(text, pos) : std::nullopt;
    if (!match) {
      ++pos;
      continue;
    }
    const auto& e = kb.entities()[match->first];
    auto end = pos + match->second;
    out.push_back({pos, end, std::string(text.substr(pos, match->second)), e.id, e.canonical_name,
                   e.category, e.attributes});
    pos = end;
  }
  return out;
}

}  // namespace stone_needle::prompt
