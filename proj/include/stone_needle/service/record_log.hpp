// SPDX-License-Identifier: Apache-2.0

// Append-only log of length-prefixed records. Each frame is
//
//   u32 little-endian payload length | u32 little-endian crc32(payload) | payload
//
// and is fsync'd before append() returns. A torn or corrupt tail (a crash in
// the middle of a write) ends the readable prefix and is cut off by the next
// append.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stone_needle::service {

struct LogContents {
  std::vector<std::string> records;
  std::uint64_t valid_bytes = 0;  // size of the intact prefix
  bool torn_tail = false;
};

// Throws PersistenceError when the file cannot be read.
LogContents read_record_log(const std::filesystem::path& path);

// Creates the file with a first record; fails if it already exists. The
// containing directory is fsync'd so the new entry survives a crash.
void create_record_log(const std::filesystem::path& path, std::string_view first_record);

// Appends one record after truncating anything beyond `expected_size` (a torn
// tail from an earlier crash). Returns the new size. Throws PersistenceError.
std::uint64_t append_record(const std::filesystem::path& path, std::uint64_t expected_size,
                            std::string_view record);

std::string encode_frame(std::string_view record);

}  // namespace stone_needle::service
