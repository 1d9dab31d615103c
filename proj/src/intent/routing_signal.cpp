// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/intent/routing_signal.hpp"

#include <cctype>

#include "stone_needle/error.hpp"

namespace stone_needle::intent {

void validate(const RoutingSignal& signal) {
  for (const auto& kw : signal.keywords) {
    if (kw.empty()) throw Error(ErrorCode::ConfigError, "empty routing keyword");
    for (unsigned char c : kw)
      if (std::isupper(c))
        throw Error(ErrorCode::ConfigError, "routing keyword '" + kw + "' is not lowercase");
  }
  if (signal.weight_text < 0 || signal.weight_modality < 0)
    throw Error(ErrorCode::ConfigError, "routing weights must be non-negative");
  if (!(signal.weight_text + signal.weight_modality > 0))
    throw Error(ErrorCode::ConfigError, "routing weights must not both be zero");
}

}  // namespace stone_needle::intent
