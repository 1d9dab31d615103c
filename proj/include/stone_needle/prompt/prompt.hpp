// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stone_needle/core/dialogue.hpp"
#include "stone_needle/mfm/mfm_stage.hpp"
#include "stone_needle/prompt/knowledge_base.hpp"

namespace stone_needle::prompt {

enum class SectionTag { History, Knowledge, ToolResult, Query };

std::string_view to_string(SectionTag tag) noexcept;

struct PromptSection {
  SectionTag tag;
  std::string body;

  bool operator==(const PromptSection&) const = default;
};

struct AssembledPrompt {
  std::string prompt_id;
  std::vector<PromptSection> sections;  // non-empty sections only, fixed order
  std::string rendered;
  std::size_t token_estimate = 0;
  std::size_t history_turns_included = 0;
};

// "[TAG]\n<body>\n" blocks joined by a blank line.
std::string render_sections(std::span<const PromptSection> sections);

// ceil(bytes / 4)
std::size_t estimate_tokens(std::string_view rendered) noexcept;

std::string render_history_turn(const TurnRecord& turn);
std::string render_query(const Query& query);

// Builds HISTORY / KNOWLEDGE / TOOL_RESULT / QUERY. Whole history turns are
// dropped oldest-first to fit `budget` tokens; throws BudgetTooSmall when the
// remaining sections alone do not fit.
AssembledPrompt assemble_prompt(const mfm::MfmOutput& mfm_output, const Query& query,
                                const DialogueHistory& history, const KnowledgeBase& kb,
                                std::size_t budget);

}  // namespace stone_needle::prompt
