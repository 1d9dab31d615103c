// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace stone_needle::net {

// "http://host:8080/v1/x" -> {"http://host:8080", "/v1/x"}
struct SplitUrl {
  std::string origin;
  std::string path;
};

inline std::optional<SplitUrl> split_url(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) return std::nullopt;
  auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") return std::nullopt;
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == scheme_end + 3) return std::nullopt;
  SplitUrl out;
  out.origin = std::string(url.substr(0, path_start));
  out.path = path_start == std::string_view::npos ? "/" : std::string(url.substr(path_start));
  return out;
}

}  // namespace stone_needle::net
