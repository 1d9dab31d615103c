// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stone_needle/core/serialize.hpp"
#include "stone_needle/intent/intent.hpp"

namespace stone_needle::eval {

struct RoutingCase {
  Query query;
  DialogueHistory history;
  Selection expected;
};

struct RoutingFixture {
  std::vector<RoutingCase> cases;
};

// Fixture format: a JSON array of
//   { "query":   { "text": str|null, "modalities": [..] },
//     "history": [ { "text": str|null, "modalities": [..] }, .. ],
//     "expected": model id | null }
// Attachments are synthesized from the modality names. Throws FixtureParseError.
RoutingFixture parse_fixture(const Json& doc);
RoutingFixture load_fixture(const std::filesystem::path& path);

// Rows are expected labels, columns predicted. Labels are the registry ids in
// registration order followed by the no-model label.
struct ConfusionMatrix {
  std::vector<Selection> labels;
  std::vector<std::vector<std::uint64_t>> counts;

  std::size_t index_of(const Selection& label) const;  // throws UnknownLabel
  std::uint64_t total() const noexcept;
};

std::string label_name(const Selection& label);  // id or "NONE"

ConfusionMatrix empty_matrix(const mfm::ModelRegistry& registry);

// Throws FixtureParseError for an empty fixture, UnknownLabel for an expected
// label outside the registry.
ConfusionMatrix run_routing_eval(const RoutingFixture& fixture, const mfm::ModelRegistry& registry,
                                 const intent::IntentConfig& config);

}  // namespace stone_needle::eval
