// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/core/resource.hpp"

#include "stone_needle/core/hashing.hpp"
#include "stone_needle/error.hpp"

namespace stone_needle {

std::string_view to_string(ResourceOrigin o) noexcept {
  return o == ResourceOrigin::UserUpload ? "user_upload" : "model_produced";
}

std::optional<ResourceOrigin> parse_origin(std::string_view name) noexcept {
  if (name == "user_upload") return ResourceOrigin::UserUpload;
  if (name == "model_produced") return ResourceOrigin::ModelProduced;
  return std::nullopt;
}

Resource make_resource(std::string_view bytes, std::string_view media_type,
                       ResourceOrigin origin) {
  Resource r;
  r.modality = modality_of(media_type);
  r.id = resource_id(bytes);
  r.media_type = std::string(media_type);
  r.byte_length = bytes.size();
  r.origin = origin;
  return r;
}

Resource InMemoryResourceStore::put(std::string_view bytes, std::string_view media_type,
                                    ResourceOrigin origin) {
  auto r = make_resource(bytes, media_type, origin);
  std::lock_guard lock(mu_);
  auto [it, inserted] = entries_.try_emplace(r.id, Entry{r, std::string(bytes)});
  return it->second.meta;
}

std::string InMemoryResourceStore::read(std::string_view id) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(id);
  if (it == entries_.end())
    throw Error(ErrorCode::UnknownResource, "no resource " + std::string(id));
  return it->second.bytes;
}

std::optional<Resource> InMemoryResourceStore::find(std::string_view id) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second.meta;
}

}  // namespace stone_needle
