// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stone_needle/core/resource.hpp"
#include "stone_needle/core/time.hpp"

namespace stone_needle {

using ModelId = std::string;
// nullopt is the distinguished "no model" outcome.
using Selection = std::optional<ModelId>;

// One turn's input: an inline text part and zero or more binary attachments.
struct Query {
  std::optional<std::string> text;
  std::vector<Resource> resources;

  bool operator==(const Query&) const = default;
};

// Throws InvalidQuery unless at least one part is present and text, when
// present, has a non-whitespace character.
void validate_query(const Query& q);
// Same check without throwing.
bool is_valid_query(const Query& q) noexcept;

// Distinct modalities of the query's attachments in first-appearance order.
std::vector<Modality> query_modalities(const Query& q);

struct RoutingTrace {
  // Registration order, one entry per registered model.
  std::vector<std::pair<ModelId, double>> scores;
  Selection selected;
  std::optional<std::size_t> fallback_turn_index;
  std::string prompt_id;
  // Degradation and resolution events, e.g. adapter failures.
  std::vector<std::string> notes;

  bool operator==(const RoutingTrace&) const = default;
};

struct Response {
  std::optional<std::string> text;
  std::vector<Resource> resources;
  RoutingTrace routing_trace;

  bool operator==(const Response&) const = default;
};

struct TurnRecord {
  std::size_t index = 0;  // 1-based
  Query query;
  Response response;
  Selection routed_model;
  Timestamp timestamp{};

  bool operator==(const TurnRecord&) const = default;
};

struct DialogueHistory {
  std::string session_id;
  std::vector<TurnRecord> turns;

  std::size_t next_index() const noexcept { return turns.size() + 1; }

  bool operator==(const DialogueHistory&) const = default;
};

// Indices must be exactly 1..n in order.
bool has_consecutive_indices(const DialogueHistory& h) noexcept;

}  // namespace stone_needle
