// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "stone_needle/core/modality.hpp"

namespace stone_needle {

enum class ResourceOrigin { UserUpload, ModelProduced };

std::string_view to_string(ResourceOrigin o) noexcept;
std::optional<ResourceOrigin> parse_origin(std::string_view name) noexcept;

// Metadata for an opaque binary attachment. The bytes live in a ResourceStore.
struct Resource {
  std::string id;  // sha-256 hex of the bytes
  Modality modality = Modality::Image;
  std::string media_type;
  std::uint64_t byte_length = 0;
  ResourceOrigin origin = ResourceOrigin::UserUpload;

  bool operator==(const Resource&) const = default;
};

// Builds the metadata for a payload; validates media type and non-emptiness.
Resource make_resource(std::string_view bytes, std::string_view media_type,
                       ResourceOrigin origin = ResourceOrigin::UserUpload);

// Where payload bytes live. Adapters read through it and model-produced
// artifacts are written through it.
class ResourceStore {
 public:
  virtual ~ResourceStore() = default;

  // Idempotent for identical bytes; the first stored origin/media type wins.
  virtual Resource put(std::string_view bytes, std::string_view media_type,
                       ResourceOrigin origin) = 0;
  // Throws UnknownResource when the id is not stored.
  virtual std::string read(std::string_view id) const = 0;
  virtual std::optional<Resource> find(std::string_view id) const = 0;
};

class InMemoryResourceStore final : public ResourceStore {
 public:
  Resource put(std::string_view bytes, std::string_view media_type,
               ResourceOrigin origin) override;
  std::string read(std::string_view id) const override;
  std::optional<Resource> find(std::string_view id) const override;

 private:
  struct Entry {
    Resource meta;
    std::string bytes;
  };
  mutable std::mutex mu_;
  std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace stone_needle
