// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/service/session_store.hpp"

#include <boost/uuid/random_generator.hpp>
#include <boost/uuid/uuid_io.hpp>

#include "stone_needle/core/serialize.hpp"
#include "stone_needle/error.hpp"
#include "stone_needle/service/record_log.hpp"

namespace stone_needle::service {

namespace fs = std::filesystem;

struct SessionStore::Slot {
  std::mutex turn_mu;
  std::mutex append_mu;
  mutable std::shared_mutex data_mu;
  Session session;
  std::uint64_t committed_bytes = 0;
};

std::string random_session_id() {
  thread_local boost::uuids::random_generator gen;
  return boost::uuids::to_string(gen());
}

bool is_valid_session_id(std::string_view id) noexcept {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id)
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
          c == '_'))
      return false;
  return true;
}

namespace {

void note_resources(Session& s, const TurnRecord& t) {
  for (const auto& r : t.query.resources) s.resource_ids.insert(r.id);
  for (const auto& r : t.response.resources) s.resource_ids.insert(r.id);
}

std::pair<Session, std::uint64_t> load_log(const fs::path& log) {
  auto contents = read_record_log(log);
  if (contents.records.empty())
    throw Error(ErrorCode::PersistenceError, log.string() + " has no session header");

  Session s;
  try {
    auto header = Json::parse(contents.records.front());
    if (header.at("type") != "session")
      throw Error(ErrorCode::PersistenceError, log.string() + " does not start with a header");
    s.session_id = header.at("session_id").get<std::string>();
    s.created_at = parse_utc(header.at("created_at").get<std::string>());
    s.history.session_id = s.session_id;

    for (std::size_t i = 1; i < contents.records.size(); ++i) {
      auto rec = Json::parse(contents.records[i]);
      const auto& type = rec.at("type");
      if (type == "turn") {
        auto turn = rec.at("turn").get<TurnRecord>();
        if (turn.index != s.history.next_index())
          throw Error(ErrorCode::PersistenceError, log.string() + ": turn index " +
                                                       std::to_string(turn.index) + " out of order");
        note_resources(s, turn);
        s.history.turns.push_back(std::move(turn));
      } else if (type == "resource") {
        s.resource_ids.insert(rec.at("resource_id").get<std::string>());
      } else {
        throw Error(ErrorCode::PersistenceError, log.string() + ": unknown record type");
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::PersistenceError, log.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::PersistenceError, log.string() + ": " + e.what());
  }
  return {std::move(s), contents.valid_bytes};
}

}  // namespace

SessionStore::SessionStore(fs::path dir, Clock clock, IdGenerator ids)
    : dir_(std::move(dir)), clock_(std::move(clock)), ids_(std::move(ids)) {}

SessionStore::~SessionStore() = default;

SessionStore::TurnLock::TurnLock(std::shared_ptr<Slot> slot)
    : slot_(std::move(slot)), lock_(slot_->turn_mu) {}
SessionStore::TurnLock::TurnLock(TurnLock&&) noexcept = default;
SessionStore::TurnLock::~TurnLock() = default;

Session SessionStore::TurnLock::snapshot() const {
  std::shared_lock lk(slot_->data_mu);
  return slot_->session;
}

fs::path SessionStore::log_path(std::string_view id) const {
  return dir_ / (std::string(id) + ".log");
}

Session SessionStore::read_session(const fs::path& log) { return load_log(log).first; }

Session SessionStore::create() {
  auto slot = std::make_shared<Slot>();
  auto& s = slot->session;
  s.session_id = ids_();
  if (!is_valid_session_id(s.session_id))
    throw Error(ErrorCode::PersistenceError, "generated session id is not file-safe");
  s.history.session_id = s.session_id;
  s.created_at = clock_();

  Json header{{"type", "session"},
              {"session_id", s.session_id},
              {"created_at", format_utc(s.created_at)}};
  auto path = log_path(s.session_id);
  create_record_log(path, header.dump());
  slot->committed_bytes = encode_frame(header.dump()).size();

  Session copy = s;
  std::unique_lock lk(slots_mu_);
  slots_[s.session_id] = std::move(slot);
  return copy;
}

std::shared_ptr<SessionStore::Slot> SessionStore::acquire(std::string_view id) {
  {
    std::shared_lock lk(slots_mu_);
    if (auto it = slots_.find(id); it != slots_.end()) return it->second;
  }
  if (!is_valid_session_id(id))
    throw Error(ErrorCode::SessionNotFound, "no session '" + std::string(id) + "'");

  std::unique_lock lk(slots_mu_);
  if (auto it = slots_.find(id); it != slots_.end()) return it->second;
  auto path = log_path(id);
  std::error_code ec;
  if (!fs::exists(path, ec))
    throw Error(ErrorCode::SessionNotFound, "no session '" + std::string(id) + "'");
  auto [session, bytes] = load_log(path);
  if (session.session_id != id)
    throw Error(ErrorCode::PersistenceError, path.string() + " belongs to another session");
  auto slot = std::make_shared<Slot>();
  slot->session = std::move(session);
  slot->committed_bytes = bytes;
  slots_.emplace(std::string(id), slot);
  return slot;
}

Session SessionStore::snapshot(std::string_view id) {
  auto slot = acquire(id);
  std::shared_lock lk(slot->data_mu);
  return slot->session;
}

bool SessionStore::exists(std::string_view id) {
  try {
    acquire(id);
    return true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SessionNotFound) return false;
    throw;
  }
}

SessionStore::TurnLock SessionStore::lock_for_turn(std::string_view id) {
  return TurnLock(acquire(id));
}

void SessionStore::append(Slot& slot, const std::string& record) {
  std::lock_guard lk(slot.append_mu);
  slot.committed_bytes =
      append_record(log_path(slot.session.session_id), slot.committed_bytes, record);
}

void SessionStore::commit_turn(TurnLock& lock, const TurnRecord& turn) {
  auto& slot = *lock.slot_;
  // Only this lock's holder appends turns, so the index cannot move under us.
  std::size_t expected;
  {
    std::shared_lock lk(slot.data_mu);
    expected = slot.session.history.next_index();
  }
  if (turn.index != expected)
    throw std::logic_error("commit_turn: index " + std::to_string(turn.index) + ", expected " +
                           std::to_string(expected));

  append(slot, Json{{"type", "turn"}, {"turn", turn}}.dump());

  std::unique_lock lk(slot.data_mu);
  note_resources(slot.session, turn);
  slot.session.history.turns.push_back(turn);
}

void SessionStore::commit_resource(std::string_view id, const std::string& resource_id) {
  auto slot = acquire(id);
  append(*slot, Json{{"type", "resource"}, {"resource_id", resource_id}}.dump());
  std::unique_lock lk(slot->data_mu);
  slot->session.resource_ids.insert(resource_id);
}

}  // namespace stone_needle::service
