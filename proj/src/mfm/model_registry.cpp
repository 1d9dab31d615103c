// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/mfm/model_registry.hpp"

#include <algorithm>

#include "stone_needle/error.hpp"

namespace stone_needle::mfm {

void ModelRegistry::register_model(ModelDescriptor descriptor) {
  if (descriptor.id.empty()) throw Error(ErrorCode::ConfigError, "model id is empty");
  if (find(descriptor.id))
    throw Error(ErrorCode::DuplicateModelId, "model '" + descriptor.id + "' already registered");
  if (descriptor.accepted_modalities.empty())
    throw Error(ErrorCode::ConfigError, "model '" + descriptor.id + "' accepts no modality");
  if (descriptor.timeout.count() <= 0)
    throw Error(ErrorCode::ConfigError, "model '" + descriptor.id + "' has a non-positive timeout");
  intent::validate(descriptor.routing_signal);
  models_.push_back(std::move(descriptor));
}

const ModelDescriptor* ModelRegistry::find(std::string_view id) const noexcept {
  auto it = std::find_if(models_.begin(), models_.end(),
                         [&](const ModelDescriptor& d) { return d.id == id; });
  return it == models_.end() ? nullptr : &*it;
}

}  // namespace stone_needle::mfm
