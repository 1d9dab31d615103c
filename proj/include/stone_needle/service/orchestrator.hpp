// SPDX-License-Identifier: Apache-2.0

// One dialogue turn end to end: intent analysis, model stage, prompt assembly,
// language model, then the durable append of the turn.

#pragma once

#include <cstddef>
#include <memory>

#include "stone_needle/intent/intent.hpp"
#include "stone_needle/mfm/model_registry.hpp"
#include "stone_needle/mlm/mlm.hpp"
#include "stone_needle/prompt/knowledge_base.hpp"
#include "stone_needle/service/session_store.hpp"

namespace stone_needle::service {

inline constexpr std::size_t kDefaultPromptBudget = 2048;

// Immutable per-turn collaborators; swapped as a whole on reload.
struct Dependencies {
  mfm::ModelRegistry registry;
  prompt::KnowledgeBase kb;
  intent::IntentConfig intent;
  mlm::MlmBackend mlm;
  std::size_t prompt_budget = kDefaultPromptBudget;
};

struct TurnOutcome {
  Response response;
  TurnRecord record;
};

// The pipeline without persistence. Adapter and language-model failures are
// absorbed into the response and its trace; InvalidQuery, BudgetTooSmall and
// EmptyRegistry propagate.
TurnOutcome execute_turn(const DialogueHistory& history, const Query& query,
                         const Dependencies& deps, ResourceStore& resources, Timestamp now);

struct TurnResult {
  Response response;
  Session session;
};

// Serializes on the session, executes the turn and commits it before
// returning. Throws InvalidQuery, SessionNotFound or PersistenceError; in every
// error case the stored history is unchanged.
TurnResult run_turn(SessionStore& sessions, std::string_view session_id, const Query& query,
                    const Dependencies& deps, ResourceStore& resources,
                    const Clock& clock = system_now);

}  // namespace stone_needle::service
