// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stone_needle/prompt/knowledge_base.hpp"

namespace stone_needle::prompt {

struct EntityAnnotation {
  std::size_t start = 0;  // byte offsets, end exclusive
  std::size_t end = 0;
  std::string surface;
  std::string entity_id;
  std::string canonical_name;
  EntityCategory category = EntityCategory::Disease;
  std::map<std::string, std::string> attributes;

  bool operator==(const EntityAnnotation&) const = default;
};

// ASCII alphanumerics, '_' and any non-ASCII byte.
bool is_word_byte(char c) noexcept;

// Leftmost-longest, case-insensitive dictionary matching at word boundaries.
std::vector<EntityAnnotation> annotate_entities(std::string_view text, const KnowledgeBase& kb);

}  // namespace stone_needle::prompt
