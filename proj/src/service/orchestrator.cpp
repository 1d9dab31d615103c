// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/service/orchestrator.hpp"

#include "stone_needle/error.hpp"
#include "stone_needle/mfm/mfm_stage.hpp"
#include "stone_needle/prompt/prompt.hpp"

namespace stone_needle::service {

namespace {

bool is_adapter_failure(ErrorCode c) {
  return c == ErrorCode::AdapterTimeout || c == ErrorCode::AdapterProtocolError ||
         c == ErrorCode::AdapterUnavailable || c == ErrorCode::UnknownResource;
}

bool is_mlm_failure(ErrorCode c) {
  return c == ErrorCode::MlmTimeout || c == ErrorCode::MlmProtocolError ||
         c == ErrorCode::MlmUnavailable || c == ErrorCode::ConfigError;
}

}  // namespace

TurnOutcome execute_turn(const DialogueHistory& history, const Query& query,
                         const Dependencies& deps, ResourceStore& resources, Timestamp now) {
  validate_query(query);

  RoutingTrace trace;
  auto scores = intent::score_models(query, history, deps.registry, deps.intent);
  trace.scores = scores.probabilities();
  trace.selected = intent::select_model(scores, deps.intent.threshold);

  mfm::MfmOutput mfm_output;
  try {
    mfm_output = mfm::run_mfm_stage(trace.selected, query, history, deps.registry, resources);
  } catch (const Error& e) {
    if (!is_adapter_failure(e.code())) throw;
    mfm_output = mfm::MfmOutput{};
    mfm_output.source_model = trace.selected;
    trace.notes.push_back("adapter " + trace.selected.value_or("none") + " failed: " + e.what());
  }
  if (mfm_output.note) trace.notes.push_back(*mfm_output.note);
  trace.fallback_turn_index = mfm_output.fallback_turn_index;

  auto prompt = prompt::assemble_prompt(mfm_output, query, history, deps.kb, deps.prompt_budget);
  trace.prompt_id = prompt.prompt_id;

  Response response;
  try {
    response.text = mlm::generate(deps.mlm, prompt);
  } catch (const Error& e) {
    if (!is_mlm_failure(e.code())) throw;
    response.text = std::string(mlm::kDegradedText);
    trace.notes.push_back(std::string("language model failed: ") + e.what());
  }
  if (mfm_output.kind == mfm::OutputKind::ResourceResult) response.resources = mfm_output.resources;
  response.routing_trace = std::move(trace);

  TurnRecord record;
  record.index = history.next_index();
  record.query = query;
  record.response = response;
  record.routed_model = response.routing_trace.selected;
  record.timestamp = now;
  return {std::move(response), std::move(record)};
}

TurnResult run_turn(SessionStore& sessions, std::string_view session_id, const Query& query,
                    const Dependencies& deps, ResourceStore& resources, const Clock& clock) {
  validate_query(query);
  auto lock = sessions.lock_for_turn(session_id);
  auto session = lock.snapshot();

  auto outcome = execute_turn(session.history, query, deps, resources, clock());
  sessions.commit_turn(lock, outcome.record);
  return {std::move(outcome.response), lock.snapshot()};
}

}  // namespace stone_needle::service
