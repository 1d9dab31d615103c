// SPDX-License-Identifier: Apache-2.0

// Intent analysis: scores every registered model against the current turn
// (text keywords plus attachment modalities, with a bounded look-back into
// earlier queries) and picks the most probable one, or none.

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "stone_needle/core/dialogue.hpp"
#include "stone_needle/mfm/model_registry.hpp"

namespace stone_needle::intent {

struct IntentConfig {
  double threshold = 0.25;
  std::size_t history_window = 3;
};

struct ModelScore {
  ModelId id;
  double raw = 0.0;
  double probability = 0.0;

  bool operator==(const ModelScore&) const = default;
};

// One entry per registered model, in registration order.
struct ScoreVector {
  std::vector<ModelScore> entries;

  const ModelScore* find(std::string_view id) const noexcept;
  // (id, probability) pairs as recorded in a routing trace.
  std::vector<std::pair<ModelId, double>> probabilities() const;

  bool operator==(const ScoreVector&) const = default;
};

// Sum-normalizes raw scores; all-zero input yields all-zero probabilities.
ScoreVector normalize(std::vector<std::pair<ModelId, double>> raw);

// Lowercased query text followed by the texts of the last `window` historical
// queries, newline separated.
std::string keyword_corpus(const Query& query, const DialogueHistory& history, std::size_t window);

// Modalities available to the turn: the query's own attachments, or when it
// has none, those of the queries inside the window.
ModalitySet available_modalities(const Query& query, const DialogueHistory& history,
                                 std::size_t window);

double raw_score(const RoutingSignal& signal, std::string_view corpus, ModalitySet available);

// Throws EmptyRegistry.
ScoreVector score_models(const Query& query, const DialogueHistory& history,
                         const mfm::ModelRegistry& registry, const IntentConfig& config);

// Highest probability wins, earliest entry on ties; nullopt when that maximum
// is below the threshold or zero.
Selection select_model(const ScoreVector& scores, double threshold);

}  // namespace stone_needle::intent
