// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/service/gateway.hpp"

#include "stone_needle/error.hpp"

namespace stone_needle::service {

Gateway::Gateway(const std::filesystem::path& data_dir, std::shared_ptr<const Dependencies> deps,
                 Clock clock, IdGenerator ids)
    : sessions_(data_dir / "sessions", clock, std::move(ids)),
      blobs_(data_dir / "blobs"),
      clock_(std::move(clock)),
      deps_(std::move(deps)) {}

Session Gateway::create_session() { return sessions_.create(); }

Resource Gateway::store_resource(std::string_view session_id, std::string_view bytes,
                                 std::string_view media_type) {
  if (!sessions_.exists(session_id))
    throw Error(ErrorCode::SessionNotFound, "no session '" + std::string(session_id) + "'");
  auto r = blobs_.put(bytes, media_type, ResourceOrigin::UserUpload);
  sessions_.commit_resource(session_id, r.id);
  return r;
}

Response Gateway::submit_turn(std::string_view session_id, std::optional<std::string> text,
                              const std::vector<std::string>& resource_ids) {
  if (!sessions_.exists(session_id))
    throw Error(ErrorCode::SessionNotFound, "no session '" + std::string(session_id) + "'");

  Query query;
  query.text = std::move(text);
  for (const auto& id : resource_ids) {
    auto r = blobs_.find(id);
    if (!r) throw Error(ErrorCode::UnknownResource, "no resource " + id);
    query.resources.push_back(std::move(*r));
  }
  validate_query(query);

  auto deps = dependencies();
  return run_turn(sessions_, session_id, query, *deps, blobs_, clock_).response;
}

DialogueHistory Gateway::get_transcript(std::string_view session_id) {
  return sessions_.snapshot(session_id).history;
}

Session Gateway::session(std::string_view session_id) { return sessions_.snapshot(session_id); }

std::optional<std::pair<Resource, std::string>> Gateway::fetch_resource(std::string_view id) const {
  auto r = blobs_.find(id);
  if (!r) return std::nullopt;
  return std::pair{*r, blobs_.read(id)};
}

std::shared_ptr<const Dependencies> Gateway::dependencies() const {
  std::lock_guard lk(deps_mu_);
  return deps_;
}

void Gateway::swap_dependencies(std::shared_ptr<const Dependencies> deps) {
  std::lock_guard lk(deps_mu_);
  deps_ = std::move(deps);
}

}  // namespace stone_needle::service
