// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/intent/intent.hpp"

#include <algorithm>
#include <cctype>

#include "stone_needle/error.hpp"

namespace stone_needle::intent {

const ModelScore* ScoreVector::find(std::string_view id) const noexcept {
  for (const auto& e : entries)
    if (e.id == id) return &e;
  return nullptr;
}

std::vector<std::pair<ModelId, double>> ScoreVector::probabilities() const {
  std::vector<std::pair<ModelId, double>> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.emplace_back(e.id, e.probability);
  return out;
}

ScoreVector normalize(std::vector<std::pair<ModelId, double>> raw) {
  double total = 0.0;
  for (const auto& [id, r] : raw) total += r;

  ScoreVector sv;
  sv.entries.reserve(raw.size());
  for (auto& [id, r] : raw)
    sv.entries.push_back({std::move(id), r, total > 0.0 ? r / total : 0.0});
  return sv;
}

namespace {

std::size_t window_start(const DialogueHistory& history, std::size_t window) {
  return history.turns.size() > window ? history.turns.size() - window : 0;
}

void append_lower(std::string& out, std::string_view s) {
  for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
}

}  // namespace

std::string keyword_corpus(const Query& query, const DialogueHistory& history,
                           std::size_t window) {
  std::string corpus;
  if (query.text) append_lower(corpus, *query.text);
  for (auto i = window_start(history, window); i < history.turns.size(); ++i) {
    const auto& text = history.turns[i].query.text;
    if (!text) continue;
    corpus.push_back('\n');
    append_lower(corpus, *text);
  }
  return corpus;
}

ModalitySet available_modalities(const Query& query, const DialogueHistory& history,
                                 std::size_t window) {
  ModalitySet present;
  for (const auto& r : query.resources) present.insert(r.modality);
  if (!query.resources.empty()) return present;
  for (auto i = window_start(history, window); i < history.turns.size(); ++i)
    for (const auto& r : history.turns[i].query.resources) present.insert(r.modality);
  return present;
}

double raw_score(const RoutingSignal& signal, std::string_view corpus, ModalitySet available) {
  double keyword_fraction = 0.0;
  if (!signal.keywords.empty()) {
    auto hits = std::count_if(signal.keywords.begin(), signal.keywords.end(),
                              [&](const std::string& kw) {
                                return corpus.find(kw) != std::string_view::npos;
                              });
    keyword_fraction = static_cast<double>(hits) / static_cast<double>(signal.keywords.size());
  }
  double modality_match = available.includes(signal.required_modalities) ? 1.0 : 0.0;
  return signal.weight_text * keyword_fraction + signal.weight_modality * modality_match;
}

ScoreVector score_models(const Query& query, const DialogueHistory& history,
                         const mfm::ModelRegistry& registry, const IntentConfig& config) {
  if (registry.empty()) throw Error(ErrorCode::EmptyRegistry, "no models registered");

  auto corpus = keyword_corpus(query, history, config.history_window);
  auto available = available_modalities(query, history, config.history_window);

  std::vector<std::pair<ModelId, double>> raw;
  raw.reserve(registry.size());
  for (const auto& m : registry.models())
    raw.emplace_back(m.id, raw_score(m.routing_signal, corpus, available));
  return normalize(std::move(raw));
}

Selection select_model(const ScoreVector& scores, double threshold) {
  const ModelScore* best = nullptr;
  for (const auto& e : scores.entries)
    if (!best || e.probability > best->probability) best = &e;
  if (!best || best->probability <= 0.0 || best->probability < threshold) return std::nullopt;
  return best->id;
}

}  // namespace stone_needle::intent
