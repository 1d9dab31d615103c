// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stone_needle/core/serialize.hpp"

namespace stone_needle::prompt {

enum class EntityCategory { Disease, Symptom, Inspection };

std::string_view to_string(EntityCategory c) noexcept;
std::optional<EntityCategory> parse_category(std::string_view s) noexcept;

struct EntityRecord {
  std::string id;
  std::string canonical_name;
  EntityCategory category = EntityCategory::Disease;
  std::vector<std::string> aliases;  // always contains canonical_name
  std::map<std::string, std::string> attributes;

  bool operator==(const EntityRecord&) const = default;
};

// Case-folds (ASCII), trims and collapses whitespace runs to one space.
std::string normalize_alias(std::string_view alias);

// Immutable dictionary of medical entities with an alias lookup trie.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  // Throws KbParseError or KbAliasConflict.
  explicit KnowledgeBase(std::vector<EntityRecord> entities);

  static KnowledgeBase from_json(const Json& doc);
  static KnowledgeBase load(const std::filesystem::path& path);

  const std::vector<EntityRecord>& entities() const noexcept { return entities_; }
  // normalized alias -> entity id
  const std::map<std::string, std::string>& alias_index() const noexcept { return alias_index_; }
  const EntityRecord* entity(std::string_view id) const noexcept;

  // Longest alias starting at `pos` whose match ends on a word boundary.
  // Returns (entity position, match length).
  std::optional<std::pair<std::size_t, std::size_t>> longest_match(std::string_view text,
                                                                   std::size_t pos) const;

 private:
  struct TrieNode {
    std::map<char, std::size_t> next;
    std::optional<std::size_t> entity;
  };

  std::vector<EntityRecord> entities_;
  std::map<std::string, std::string> alias_index_;
  std::vector<TrieNode> trie_{1};
};

// Every problem found in a KB document (parse errors, alias conflicts, missing
// fields); empty means the document loads cleanly.
std::vector<std::string> lint_knowledge_base(const Json& doc);

}  // namespace stone_needle::prompt
