// SPDX-License-Identifier: Apache-2.0

// Random case generators shared by unit and acceptance tests.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "stone_needle/core/dialogue.hpp"
#include "stone_needle/core/hashing.hpp"
#include "stone_needle/mfm/model_registry.hpp"

namespace stone_needle::gen {

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {
      "segment", "scan",  "describe", "transcribe", "audio",   "image", "health",
      "index",   "chest", "pain",     "fever",      "please",  "what",  "the",
      "lung",    "x-ray", "vitals",   "record",     "segments", "show", "my"};
  return words;
}

inline std::string pick(std::mt19937& rng, const std::vector<std::string>& v) {
  return v[rng() % v.size()];
}

inline std::string random_case(std::mt19937& rng, std::string s) {
  for (auto& c : s)
    if (rng() % 4 == 0 && c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
  return s;
}

inline Resource stub_resource(Modality m, unsigned salt) {
  static const char* types[] = {"text/plain", "image/png", "video/mp4", "audio/wav"};
  auto mt = types[static_cast<int>(m)];
  return make_resource(std::string(mt) + "#" + std::to_string(salt), mt);
}

// Up to 20 tokens drawn from the vocabulary plus a few fillers.
inline std::optional<std::string> random_text(std::mt19937& rng, bool allow_none = true) {
  if (allow_none && rng() % 5 == 0) return std::nullopt;
  std::string t;
  int n = 1 + rng() % 20;
  for (int i = 0; i < n; ++i) {
    if (i) t += rng() % 6 == 0 ? "  " : " ";
    t += rng() % 3 == 0 ? std::string("zz") + std::to_string(rng() % 9)
                        : random_case(rng, pick(rng, vocabulary()));
  }
  return t;
}

inline std::vector<Resource> random_resources(std::mt19937& rng, int max_count,
                                              int modality_count = 4) {
  std::vector<Resource> out;
  int n = rng() % (max_count + 1);
  for (int i = 0; i < n; ++i)
    out.push_back(stub_resource(static_cast<Modality>(rng() % modality_count), rng()));
  return out;
}

inline Query random_query(std::mt19937& rng) {
  Query q;
  q.text = random_text(rng);
  q.resources = random_resources(rng, 2);
  if (!q.text && q.resources.empty()) q.text = "what";
  return q;
}

inline DialogueHistory random_history(std::mt19937& rng, std::size_t max_turns) {
  DialogueHistory h;
  h.session_id = "gen";
  std::size_t n = rng() % (max_turns + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    TurnRecord t;
    t.index = i;
    t.query = random_query(rng);
    t.response.text = "ok";
    h.turns.push_back(std::move(t));
  }
  return h;
}

inline mfm::ModelRegistry random_registry(std::mt19937& rng, std::size_t max_models) {
  static const double weights[] = {0.0, 0.5, 1.0, 2.0, 0.3};
  mfm::ModelRegistry reg;
  std::size_t n = 1 + rng() % max_models;
  for (std::size_t i = 0; i < n; ++i) {
    mfm::ModelDescriptor d;
    d.id = "m" + std::to_string(i);
    d.display_name = d.id;
    d.accepted_modalities.insert(static_cast<Modality>(rng() % 4));
    d.endpoint = "mock://echo-describe";
    auto& sig = d.routing_signal;
    for (int k = rng() % 4; k > 0; --k) {
      auto kw = pick(rng, vocabulary());
      if (rng() % 4 == 0) kw += " " + pick(rng, vocabulary());
      sig.keywords.push_back(kw);
    }
    for (int k = rng() % 3; k > 0; --k) sig.required_modalities.insert(static_cast<Modality>(rng() % 4));
    sig.weight_text = weights[rng() % 5];
    sig.weight_modality = weights[rng() % 5];
    if (sig.weight_text == 0.0 && sig.weight_modality == 0.0) sig.weight_text = 1.0;
    reg.register_model(std::move(d));
  }
  return reg;
}

inline double random_threshold(std::mt19937& rng) {
  static const double fixed[] = {0.0, 0.25, 0.5, 1.0 / 3.0, 1.0};
  if (rng() % 2) return fixed[rng() % 5];
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace stone_needle::gen
