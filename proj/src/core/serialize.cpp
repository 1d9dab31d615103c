// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/core/serialize.hpp"

namespace stone_needle {

namespace {

Json optional_string(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

std::optional<std::string> read_optional_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

void to_json(Json& j, const Resource& r) {
  j = Json{{"id", r.id},
           {"modality", to_string(r.modality)},
           {"media_type", r.media_type},
           {"byte_length", r.byte_length},
           {"origin", to_string(r.origin)}};
}

void from_json(const Json& j, Resource& r) {
  r.id = j.at("id").get<std::string>();
  auto m = parse_modality(j.at("modality").get<std::string>());
  auto o = parse_origin(j.at("origin").get<std::string>());
  if (!m || !o) throw Json::other_error::create(501, "bad modality or origin", &j);
  r.modality = *m;
  r.origin = *o;
  r.media_type = j.at("media_type").get<std::string>();
  r.byte_length = j.at("byte_length").get<std::uint64_t>();
}

void to_json(Json& j, const Query& q) {
  j = Json{{"text", optional_string(q.text)}, {"resources", q.resources}};
}

void from_json(const Json& j, Query& q) {
  q.text = read_optional_string(j, "text");
  q.resources = j.at("resources").get<std::vector<Resource>>();
}

void to_json(Json& j, const RoutingTrace& t) {
  Json scores = Json::object();
  for (const auto& [id, p] : t.scores) scores[id] = p;
  j = Json{{"scores", std::move(scores)},
           {"selected", optional_string(t.selected)},
           {"fallback_turn_index",
            t.fallback_turn_index ? Json(*t.fallback_turn_index) : Json(nullptr)},
           {"prompt_id", t.prompt_id},
           {"notes", t.notes}};
}

void from_json(const Json& j, RoutingTrace& t) {
  t.scores.clear();
  for (const auto& [id, p] : j.at("scores").items()) t.scores.emplace_back(id, p.get<double>());
  t.selected = read_optional_string(j, "selected");
  const auto& fb = j.at("fallback_turn_index");
  t.fallback_turn_index = fb.is_null() ? std::nullopt : std::optional(fb.get<std::size_t>());
  t.prompt_id = j.value("prompt_id", std::string());
  t.notes = j.value("notes", std::vector<std::string>{});
}

void to_json(Json& j, const Response& r) {
  j = Json{{"text", optional_string(r.text)},
           {"resources", r.resources},
           {"trace", r.routing_trace}};
}

void from_json(const Json& j, Response& r) {
  r.text = read_optional_string(j, "text");
  r.resources = j.at("resources").get<std::vector<Resource>>();
  r.routing_trace = j.at("trace").get<RoutingTrace>();
}

void to_json(Json& j, const TurnRecord& t) {
  j = Json{{"index", t.index},
           {"timestamp", format_utc(t.timestamp)},
           {"query", t.query},
           {"response", t.response},
           {"routed_model", optional_string(t.routed_model)}};
}

void from_json(const Json& j, TurnRecord& t) {
  t.index = j.at("index").get<std::size_t>();
  t.timestamp = parse_utc(j.at("timestamp").get<std::string>());
  t.query = j.at("query").get<Query>();
  t.response = j.at("response").get<Response>();
  t.routed_model = read_optional_string(j, "routed_model");
}

void to_json(Json& j, const DialogueHistory& h) {
  j = Json{{"session_id", h.session_id}, {"turns", h.turns}};
}

void from_json(const Json& j, DialogueHistory& h) {
  h.session_id = j.at("session_id").get<std::string>();
  h.turns = j.at("turns").get<std::vector<TurnRecord>>();
}

}  // namespace stone_needle
