// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace stone_needle {

// Lowercase hex SHA-256 of the given bytes. Works on empty input.
std::string sha256_hex(std::string_view bytes);

// Content id of a resource payload. Throws EmptyPayload on zero-length input.
std::string resource_id(std::string_view bytes);

bool is_resource_id(std::string_view s) noexcept;

std::string base64_encode(std::string_view bytes);
// Throws std::invalid_argument on malformed input.
std::string base64_decode(std::string_view text);

}  // namespace stone_needle
