// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "stone_needle/core/modality.hpp"

namespace stone_needle::intent {

// Declarative routing hints attached to each registered model.
struct RoutingSignal {
  std::vector<std::string> keywords;  // lowercase, non-empty phrases
  ModalitySet required_modalities;
  double weight_text = 1.0;
  double weight_modality = 1.0;
};

// Throws ConfigError when a keyword is empty or not lowercase, a weight is
// negative, or both weights are zero.
void validate(const RoutingSignal& signal);

}  // namespace stone_needle::intent
