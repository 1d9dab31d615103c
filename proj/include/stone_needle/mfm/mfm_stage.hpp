// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stone_needle/core/dialogue.hpp"
#include "stone_needle/core/resource.hpp"
#include "stone_needle/mfm/model_registry.hpp"

namespace stone_needle::mfm {

enum class OutputKind { TextResult, ResourceResult, Empty };

std::string_view to_string(OutputKind kind) noexcept;

struct MfmOutput {
  OutputKind kind = OutputKind::Empty;
  std::optional<std::string> text;
  std::vector<Resource> resources;  // ResourceResult only; origin is ModelProduced
  Selection source_model;           // nullopt only for the no-model branch
  std::optional<std::size_t> fallback_turn_index;
  std::optional<std::string> note;  // e.g. "no compatible resource"

  bool operator==(const MfmOutput&) const = default;
};

struct ResolvedResources {
  std::vector<Resource> resources;
  std::optional<std::size_t> fallback_turn_index;

  bool operator==(const ResolvedResources&) const = default;
};

// Accepted-modality attachments of the current query; failing that, all
// accepted-modality attachments of the most recent earlier query that has any.
// Only queries are searched, never responses.
ResolvedResources resolve_resources(const Query& query, const DialogueHistory& history,
                                    ModalitySet accepted);

// Calls the descriptor's adapter. Produced artifacts are written to `store`.
MfmOutput dispatch(const ModelDescriptor& descriptor, const std::vector<Resource>& resources,
                   const std::optional<std::string>& query_text, ResourceStore& store);

// The whole model stage for one turn. Adapter errors propagate.
MfmOutput run_mfm_stage(const Selection& selected, const Query& query,
                        const DialogueHistory& history, const ModelRegistry& registry,
                        ResourceStore& store);

// "model <id> produced <modality> resource <hash>", one line per resource.
std::string describe_produced(const MfmOutput& output);

}  // namespace stone_needle::mfm
