// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/core/dialogue.hpp"

#include <algorithm>
#include <cctype>

#include "stone_needle/error.hpp"

namespace stone_needle {

namespace {

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

bool is_valid_query(const Query& q) noexcept {
  if (q.text && blank(*q.text)) return false;
  return q.text.has_value() || !q.resources.empty();
}

void validate_query(const Query& q) {
  if (q.text && blank(*q.text))
    throw Error(ErrorCode::InvalidQuery, "query text is empty after trimming");
  if (!q.text && q.resources.empty())
    throw Error(ErrorCode::InvalidQuery, "query has neither text nor resources");
}

std::vector<Modality> query_modalities(const Query& q) {
  std::vector<Modality> out;
  for (const auto& r : q.resources)
    if (std::find(out.begin(), out.end(), r.modality) == out.end()) out.push_back(r.modality);
  return out;
}

bool has_consecutive_indices(const DialogueHistory& h) noexcept {
  for (std::size_t i = 0; i < h.turns.size(); ++i)
    if (h.turns[i].index != i + 1) return false;
  return true;
}

}  // namespace stone_needle
