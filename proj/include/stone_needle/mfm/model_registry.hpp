// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <span>
#include <string>
#include <vector>

#include "stone_needle/core/dialogue.hpp"
#include "stone_needle/intent/routing_signal.hpp"

namespace stone_needle::mfm {

inline constexpr std::chrono::milliseconds kDefaultAdapterTimeout{10'000};

struct ModelDescriptor {
  ModelId id;
  std::string display_name;
  ModalitySet accepted_modalities;
  intent::RoutingSignal routing_signal;
  // "http://host:port/path" for remote adapters, "mock://<name>" for built-ins.
  std::string endpoint;
  std::chrono::milliseconds timeout = kDefaultAdapterTimeout;
};

// The model ensemble, kept in registration order. Registration order is the
// tie-break for selection.
class ModelRegistry {
 public:
  // Throws DuplicateModelId, or ConfigError for an invalid descriptor.
  void register_model(ModelDescriptor descriptor);

  std::span<const ModelDescriptor> models() const noexcept { return models_; }
  const ModelDescriptor* find(std::string_view id) const noexcept;
  std::size_t size() const noexcept { return models_.size(); }
  bool empty() const noexcept { return models_.empty(); }

 private:
  std::vector<ModelDescriptor> models_;
};

}  // namespace stone_needle::mfm
