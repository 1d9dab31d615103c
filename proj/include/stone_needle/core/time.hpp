// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace stone_needle {

using Timestamp = std::chrono::sys_seconds;
using Clock = std::function<Timestamp()>;

Timestamp system_now();

// "2024-05-01T12:00:00Z"
std::string format_utc(Timestamp t);
// Inverse of format_utc; throws std::invalid_argument on anything else.
Timestamp parse_utc(std::string_view s);

}  // namespace stone_needle
