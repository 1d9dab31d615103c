// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "stone_needle/core/resource.hpp"

namespace stone_needle::service {

// Content-addressed payloads under <root>/<first two hex>/<hash>, with the
// first-seen metadata in a <hash>.meta JSON sidecar. Writes go through a temp
// file and rename, so a blob is either absent or complete.
class BlobStore final : public ResourceStore {
 public:
  // Throws PersistenceError if the root cannot be created.
  explicit BlobStore(std::filesystem::path root);

  Resource put(std::string_view bytes, std::string_view media_type,
               ResourceOrigin origin) override;
  std::string read(std::string_view id) const override;
  std::optional<Resource> find(std::string_view id) const override;

  std::filesystem::path blob_path(std::string_view id) const;
  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path root_;
};

}  // namespace stone_needle::service
