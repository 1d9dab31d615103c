// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stone_needle/service/blob_store.hpp"
#include "stone_needle/service/orchestrator.hpp"
#include "stone_needle/service/session_store.hpp"

namespace stone_needle::service {

// Service facade shared by the HTTP API and the terminal chat. Owns the
// session store (data_dir/sessions) and blob store (data_dir/blobs).
class Gateway {
 public:
  Gateway(const std::filesystem::path& data_dir, std::shared_ptr<const Dependencies> deps,
          Clock clock = system_now, IdGenerator ids = random_session_id);

  Session create_session();

  // Stores an upload for a session. Throws SessionNotFound,
  // UnsupportedMediaType, EmptyPayload or PersistenceError.
  Resource store_resource(std::string_view session_id, std::string_view bytes,
                          std::string_view media_type);

  // Throws SessionNotFound, UnknownResource, InvalidQuery, BudgetTooSmall or
  // PersistenceError.
  Response submit_turn(std::string_view session_id, std::optional<std::string> text,
                       const std::vector<std::string>& resource_ids);

  DialogueHistory get_transcript(std::string_view session_id);
  Session session(std::string_view session_id);

  std::optional<std::pair<Resource, std::string>> fetch_resource(std::string_view id) const;

  std::shared_ptr<const Dependencies> dependencies() const;
  // In-flight turns finish with the snapshot they started with.
  void swap_dependencies(std::shared_ptr<const Dependencies> deps);

  SessionStore& sessions() noexcept { return sessions_; }
  BlobStore& blobs() noexcept { return blobs_; }

 private:
  SessionStore sessions_;
  BlobStore blobs_;
  Clock clock_;
  mutable std::mutex deps_mu_;
  std::shared_ptr<const Dependencies> deps_;
};

}  // namespace stone_needle::service
