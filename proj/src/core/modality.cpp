// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/core/modality.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

#include "stone_needle/error.hpp"

namespace stone_needle {

std::string_view to_string(Modality m) noexcept {
  switch (m) {
    case Modality::Text: return "text";
    case Modality::Image: return "image";
    case Modality::Video: return "video";
    case Modality::Audio: return "audio";
  }
  return "text";
}

std::optional<Modality> parse_modality(std::string_view name) noexcept {
  for (auto m : kAllModalities)
    if (to_string(m) == name) return m;
  return std::nullopt;
}

namespace {

bool is_token_char(char c) {
  auto u = static_cast<unsigned char>(c);
  if (std::isalnum(u)) return true;
  return std::string_view("!#$&-^_.+").find(c) != std::string_view::npos;
}

bool is_token(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_token_char);
}

}  // namespace

Modality modality_of(std::string_view media_type) {
  // Parameters (";charset=...") are allowed and ignored.
  auto semi = media_type.find(';');
  auto essence = media_type.substr(0, semi);
  while (!essence.empty() && essence.back() == ' ') essence.remove_suffix(1);

  auto slash = essence.find('/');
  if (slash == std::string_view::npos || !is_token(essence.substr(0, slash)) ||
      !is_token(essence.substr(slash + 1))) {
    throw Error(ErrorCode::UnsupportedMediaType,
                "malformed media type '" + std::string(media_type) + "'");
  }

  std::string top(essence.substr(0, slash));
  std::transform(top.begin(), top.end(), top.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (auto m = parse_modality(top)) return *m;
  throw Error(ErrorCode::UnsupportedMediaType,
              "media type '" + std::string(media_type) + "' is not text, image, video or audio");
}

std::size_t ModalitySet::size() const noexcept {
  return static_cast<std::size_t>(std::popcount(bits_));
}

}  // namespace stone_needle
