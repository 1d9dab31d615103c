// SPDX-License-Identifier: Apache-2.0

// JSON mapping of the domain values; this is the persistence and transcript
// format. Objects keep insertion order, so dump() output is byte-stable.

#pragma once

#include <json.hpp>

#include "stone_needle/core/dialogue.hpp"

namespace stone_needle {

using Json = nlohmann::ordered_json;

void to_json(Json& j, const Resource& r);
void from_json(const Json& j, Resource& r);
void to_json(Json& j, const Query& q);
void from_json(const Json& j, Query& q);
void to_json(Json& j, const RoutingTrace& t);
void from_json(const Json& j, RoutingTrace& t);
void to_json(Json& j, const Response& r);
void from_json(const Json& j, Response& r);
void to_json(Json& j, const TurnRecord& t);
void from_json(const Json& j, TurnRecord& t);
void to_json(Json& j, const DialogueHistory& h);
void from_json(const Json& j, DialogueHistory& h);

}  // namespace stone_needle
