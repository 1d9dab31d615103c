// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>

#include "stone_needle/core/dialogue.hpp"

namespace stone_needle::service {

struct Session {
  std::string session_id;
  DialogueHistory history;
  Timestamp created_at{};
  std::set<std::string> resource_ids;

  bool operator==(const Session&) const = default;
};

using IdGenerator = std::function<std::string()>;

// Random RFC 4122 version-4 UUID.
std::string random_session_id();

// [A-Za-z0-9_-], 1 to 64 chars; ids become file names.
bool is_valid_session_id(std::string_view id) noexcept;

// Sessions persisted as one record log per session under `dir`:
// a header record, then one record per committed turn or upload. Sessions
// are cached after first load. Turns on one session are serialized through
// TurnLock; reads take a snapshot and never wait for a turn in progress.
class SessionStore {
  struct Slot;

 public:
  explicit SessionStore(std::filesystem::path dir, Clock clock = system_now,
                        IdGenerator ids = random_session_id);
  ~SessionStore();

  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  // Exclusive right to append the next turn of one session.
  class TurnLock {
   public:
    TurnLock(TurnLock&&) noexcept;
    ~TurnLock();
    Session snapshot() const;

   private:
    friend class SessionStore;
    TurnLock(std::shared_ptr<Slot> slot);
    std::shared_ptr<Slot> slot_;
    std::unique_lock<std::mutex> lock_;
  };

  // Throws PersistenceError.
  Session create();
  // Throws SessionNotFound (or PersistenceError for an unreadable log).
  Session snapshot(std::string_view id);
  bool exists(std::string_view id);
  TurnLock lock_for_turn(std::string_view id);

  // Appends and fsyncs the turn, then publishes it. The turn's index must be
  // the session's next index. On failure nothing is published.
  void commit_turn(TurnLock& lock, const TurnRecord& turn);
  void commit_resource(std::string_view id, const std::string& resource_id);

  std::filesystem::path log_path(std::string_view id) const;

  // Rebuilds a session from its log; a torn tail is ignored.
  static Session read_session(const std::filesystem::path& log);

 private:
  std::shared_ptr<Slot> acquire(std::string_view id);
  void append(Slot& slot, const std::string& record);

  std::filesystem::path dir_;
  Clock clock_;
  IdGenerator ids_;
  std::shared_mutex slots_mu_;
  std::map<std::string, std::shared_ptr<Slot>, std::less<>> slots_;
};

}  // namespace stone_needle::service
