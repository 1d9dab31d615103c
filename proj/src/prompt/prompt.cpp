// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/prompt/prompt.hpp"

#include <set>
#include <stdexcept>

#include "stone_needle/core/hashing.hpp"
#include "stone_needle/error.hpp"
#include "stone_needle/prompt/annotate.hpp"

namespace stone_needle::prompt {

std::string_view to_string(SectionTag tag) noexcept {
  switch (tag) {
    case SectionTag::History: return "HISTORY";
    case SectionTag::Knowledge: return "KNOWLEDGE";
    case SectionTag::ToolResult: return "TOOL_RESULT";
    case SectionTag::Query: return "QUERY";
  }
  return "QUERY";
}

std::string render_sections(std::span<const PromptSection> sections) {
  std::string out;
  for (const auto& s : sections) {
    if (s.body.empty()) continue;
    if (!out.empty()) out += '\n';
    out += '[';
    out += to_string(s.tag);
    out += "]\n";
    out += s.body;
    out += '\n';
  }
  return out;
}

namespace {

std::size_t tokens_for_bytes(std::size_t n) noexcept { return (n + 3) / 4; }

std::string modality_list(const std::vector<Resource>& resources) {
  std::string out;
  Query q{std::nullopt, resources};
  for (auto m : query_modalities(q)) {
    if (!out.empty()) out += ", ";
    out += to_string(m);
  }
  return out;
}

std::string knowledge_line(const EntityRecord& e) {
  std::string line = e.canonical_name + " [" + std::string(to_string(e.category)) + "]";
  std::string sep = ": ";
  for (const auto& [k, v] : e.attributes) {
    line += sep + k + "=" + v;
    sep = "; ";
  }
  return line;
}

std::string knowledge_body(const Query& query, const mfm::MfmOutput& mfm_output,
                           const KnowledgeBase& kb) {
  std::vector<std::string_view> texts;
  if (query.text) texts.push_back(*query.text);
  if (mfm_output.kind == mfm::OutputKind::TextResult && mfm_output.text)
    texts.push_back(*mfm_output.text);

  std::set<std::string> seen;
  std::string body;
  for (auto text : texts) {
    for (const auto& a : annotate_entities(text, kb)) {
      if (!seen.insert(a.entity_id).second) continue;
      if (!body.empty()) body += '\n';
      body += knowledge_line(*kb.entity(a.entity_id));
    }
  }
  return body;
}

std::string tool_body(const mfm::MfmOutput& out) {
  switch (out.kind) {
    case mfm::OutputKind::TextResult: return out.text.value_or("");
    case mfm::OutputKind::ResourceResult: return mfm::describe_produced(out);
    case mfm::OutputKind::Empty: return {};
  }
  return {};
}

}  // namespace

std::size_t estimate_tokens(std::string_view rendered) noexcept {
  return tokens_for_bytes(rendered.size());
}

std::string render_query(const Query& query) {
  if (query.text) return *query.text;
  return "[non-text query: " + modality_list(query.resources) + "]";
}

std::string render_history_turn(const TurnRecord& turn) {
  const auto& r = turn.response;
  std::string assistant =
      r.text ? *r.text : "[non-text response: " + modality_list(r.resources) + "]";
  return "USER: " + render_query(turn.query) + "\nASSISTANT: " + assistant;
}

AssembledPrompt assemble_prompt(const mfm::MfmOutput& mfm_output, const Query& query,
                                const DialogueHistory& history, const KnowledgeBase& kb,
                                std::size_t budget) {
  if (budget == 0) throw std::invalid_argument("assemble_prompt: budget must be positive");
  validate_query(query);

  std::vector<PromptSection> fixed;
  if (auto body = knowledge_body(query, mfm_output, kb); !body.empty())
    fixed.push_back({SectionTag::Knowledge, std::move(body)});
  if (auto body = tool_body(mfm_output); !body.empty())
    fixed.push_back({SectionTag::ToolResult, std::move(body)});
  fixed.push_back({SectionTag::Query, render_query(query)});

  std::size_t fixed_bytes = render_sections(fixed).size();
  if (tokens_for_bytes(fixed_bytes) > budget)
    throw Error(ErrorCode::BudgetTooSmall, "query, knowledge and tool result need " +
                                               std::to_string(tokens_for_bytes(fixed_bytes)) +
                                               " tokens, budget is " + std::to_string(budget));

  std::vector<std::string> blocks;
  blocks.reserve(history.turns.size());
  for (const auto& t : history.turns) blocks.push_back(render_history_turn(t));

  // Rendered size with blocks[first..] kept: "[HISTORY]\n" + body + "\n" + "\n"
  // separator in front of the fixed sections, body being blocks joined by "\n".
  std::size_t body_bytes = 0;
  for (const auto& b : blocks) body_bytes += b.size();
  std::size_t first = 0;
  auto total_with = [&](std::size_t kept_bytes, std::size_t kept) {
    if (kept == 0) return fixed_bytes;
    return fixed_bytes + 10 + kept_bytes + (kept - 1) + 2;
  };
  while (first < blocks.size() &&
         tokens_for_bytes(total_with(body_bytes, blocks.size() - first)) > budget) {
    body_bytes -= blocks[first].size();
    ++first;
  }

  AssembledPrompt prompt;
  if (first < blocks.size()) {
    std::string body;
    for (auto i = first; i < blocks.size(); ++i) {
      if (i != first) body += '\n';
      body += blocks[i];
    }
    prompt.sections.push_back({SectionTag::History, std::move(body)});
  }
  for (auto& s : fixed) prompt.sections.push_back(std::move(s));
  prompt.history_turns_included = blocks.size() - first;
  prompt.rendered = render_sections(prompt.sections);
  prompt.token_estimate = estimate_tokens(prompt.rendered);
  prompt.prompt_id = sha256_hex(prompt.rendered).substr(0, 16);
  return prompt;
}

}  // namespace stone_needle::prompt
