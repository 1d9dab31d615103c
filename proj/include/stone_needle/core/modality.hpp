// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace stone_needle {

enum class Modality { Text, Image, Video, Audio };

inline constexpr std::array<Modality, 4> kAllModalities = {
    Modality::Text, Modality::Image, Modality::Video, Modality::Audio};

// Lowercase wire name: "text", "image", "video", "audio".
std::string_view to_string(Modality m) noexcept;
std::optional<Modality> parse_modality(std::string_view name) noexcept;

// Maps the top-level MIME type onto a modality. Throws UnsupportedMediaType for
// anything outside text/image/video/audio or for a syntactically broken type.
Modality modality_of(std::string_view media_type);

// Small bitset over the four modalities; iteration order is the enum order.
class ModalitySet {
 public:
  constexpr ModalitySet() = default;
  constexpr ModalitySet(std::initializer_list<Modality> ms) {
    for (auto m : ms) insert(m);
  }

  constexpr void insert(Modality m) noexcept { bits_ |= bit(m); }
  constexpr bool contains(Modality m) const noexcept { return (bits_ & bit(m)) != 0; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr bool includes(ModalitySet other) const noexcept {
    return (bits_ & other.bits_) == other.bits_;
  }
  std::size_t size() const noexcept;

  constexpr bool operator==(const ModalitySet&) const = default;

  template <typename F>
  void for_each(F&& f) const {
    for (auto m : kAllModalities)
      if (contains(m)) f(m);
  }

 private:
  static constexpr unsigned bit(Modality m) noexcept { return 1u << static_cast<unsigned>(m); }
  unsigned bits_ = 0;
};

}  // namespace stone_needle
