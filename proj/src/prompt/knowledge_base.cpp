// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/prompt/knowledge_base.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "stone_needle/error.hpp"
#include "stone_needle/prompt/annotate.hpp"

namespace stone_needle::prompt {

std::string_view to_string(EntityCategory c) noexcept {
  switch (c) {
    case EntityCategory::Disease: return "disease";
    case EntityCategory::Symptom: return "symptom";
    case EntityCategory::Inspection: return "inspection";
  }
  return "disease";
}

std::optional<EntityCategory> parse_category(std::string_view s) noexcept {
  if (s == "disease") return EntityCategory::Disease;
  if (s == "symptom") return EntityCategory::Symptom;
  if (s == "inspection") return EntityCategory::Inspection;
  return std::nullopt;
}

std::string normalize_alias(std::string_view alias) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : alias) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

namespace {

// Reports a problem: collected when linting, thrown otherwise.
class Problems {
 public:
  explicit Problems(std::vector<std::string>* sink) : sink_(sink) {}

  void report(ErrorCode code, const std::string& what) {
    if (!sink_) throw Error(code, what);
    sink_->push_back(what);
  }

 private:
  std::vector<std::string>* sink_;
};

std::vector<EntityRecord> parse_entities(const Json& doc, Problems& problems) {
  std::vector<EntityRecord> out;
  if (!doc.is_object() || !doc.contains("entities") || !doc["entities"].is_array()) {
    problems.report(ErrorCode::KbParseError, "document must be an object with an 'entities' array");
    return out;
  }

  std::size_t n = 0;
  for (const auto& e : doc["entities"]) {
    auto where = "entity #" + std::to_string(n++);
    if (!e.is_object()) {
      problems.report(ErrorCode::KbParseError, where + ": not an object");
      continue;
    }
    auto str_field = [&](const char* key) -> std::optional<std::string> {
      auto it = e.find(key);
      if (it == e.end() || !it->is_string() || it->get<std::string>().empty()) {
        problems.report(ErrorCode::KbParseError, where + ": missing or empty '" + key + "'");
        return std::nullopt;
      }
      return it->get<std::string>();
    };

    auto id = str_field("id");
    auto canonical = str_field("canonical_name");
    auto category_name = str_field("category");
    if (!id || !canonical || !category_name) continue;
    where += " ('" + *id + "')";

    auto category = parse_category(*category_name);
    if (!category) {
      problems.report(ErrorCode::KbParseError, where + ": unknown category '" + *category_name + "'");
      continue;
    }

    EntityRecord rec{*id, *canonical, *category, {}, {}};
    bool ok = true;
    if (auto it = e.find("aliases"); it != e.end()) {
      if (!it->is_array()) {
        problems.report(ErrorCode::KbParseError, where + ": 'aliases' must be an array");
        ok = false;
      } else {
        for (const auto& a : *it) {
          if (!a.is_string() || normalize_alias(a.get<std::string>()).empty()) {
            problems.report(ErrorCode::KbParseError, where + ": aliases must be non-empty strings");
            ok = false;
            break;
          }
          rec.aliases.push_back(a.get<std::string>());
        }
      }
    }
    if (auto it = e.find("attributes"); it != e.end()) {
      if (!it->is_object()) {
        problems.report(ErrorCode::KbParseError, where + ": 'attributes' must be an object");
        ok = false;
      } else {
        for (const auto& [k, v] : it->items()) {
          if (!v.is_string()) {
            problems.report(ErrorCode::KbParseError, where + ": attribute '" + k + "' is not a string");
            ok = false;
            continue;
          }
          rec.attributes[k] = v.get<std::string>();
        }
      }
    }
    if (ok) out.push_back(std::move(rec));
  }
  return out;
}

// Adds the self-alias, dedupes aliases per entity and checks global uniqueness.
std::map<std::string, std::string> index_aliases(std::vector<EntityRecord>& entities,
                                                 Problems& problems) {
  std::map<std::string, std::string> index;
  std::set<std::string> ids;
  for (auto& e : entities) {
    if (!ids.insert(e.id).second)
      problems.report(ErrorCode::KbParseError, "duplicate entity id '" + e.id + "'");

    auto canonical_norm = normalize_alias(e.canonical_name);
    if (canonical_norm.empty()) {
      problems.report(ErrorCode::KbParseError, "entity '" + e.id + "' has a blank canonical name");
      continue;
    }
    bool has_self = false;
    for (const auto& a : e.aliases) has_self = has_self || normalize_alias(a) == canonical_norm;
    if (!has_self) e.aliases.insert(e.aliases.begin(), e.canonical_name);

    for (const auto& a : e.aliases) {
      auto key = normalize_alias(a);
      if (key.empty()) {
        problems.report(ErrorCode::KbParseError, "entity '" + e.id + "' has a blank alias");
        continue;
      }
      auto [it, inserted] = index.emplace(key, e.id);
      if (!inserted && it->second != e.id)
        problems.report(ErrorCode::KbAliasConflict, "alias '" + key + "' maps to both '" +
                                                        it->second + "' and '" + e.id + "'");
    }
  }
  return index;
}

}  // namespace

KnowledgeBase::KnowledgeBase(std::vector<EntityRecord> entities) : entities_(std::move(entities)) {
  Problems throwing(nullptr);
  alias_index_ = index_aliases(entities_, throwing);

  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < entities_.size(); ++i) position[entities_[i].id] = i;

  for (const auto& [alias, id] : alias_index_) {
    std::size_t node = 0;
    for (char c : alias) {
      auto it = trie_[node].next.find(c);
      if (it == trie_[node].next.end()) {
        trie_.emplace_back();
        it = trie_[node].next.emplace(c, trie_.size() - 1).first;
      }
      node = it->second;
    }
    trie_[node].entity = position.at(id);
  }
}

KnowledgeBase KnowledgeBase::from_json(const Json& doc) {
  Problems throwing(nullptr);
  return KnowledgeBase(parse_entities(doc, throwing));
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::KbParseError, "cannot open knowledge base " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Json doc = Json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded())
    throw Error(ErrorCode::KbParseError, path.string() + " is not valid JSON");
  return from_json(doc);
}

const EntityRecord* KnowledgeBase::entity(std::string_view id) const noexcept {
  for (const auto& e : entities_)
    if (e.id == id) return &e;
  return nullptr;
}

std::optional<std::pair<std::size_t, std::size_t>> KnowledgeBase::longest_match(
    std::string_view text, std::size_t pos) const {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  std::size_t node = 0;
  for (std::size_t i = pos; i < text.size(); ++i) {
    auto c = static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
    auto it = trie_[node].next.find(c);
    if (it == trie_[node].next.end()) break;
    node = it->second;
    auto end = i + 1;
    if (trie_[node].entity && (end == text.size() || !is_word_byte(text[end])))
      best = std::pair{*trie_[node].entity, end - pos};
  }
  return best;
}

std::vector<std::string> lint_knowledge_base(const Json& doc) {
  std::vector<std::string> problems;
  Problems collecting(&problems);
  auto entities = parse_entities(doc, collecting);
  index_aliases(entities, collecting);
  return problems;
}

}  // namespace stone_needle::prompt
