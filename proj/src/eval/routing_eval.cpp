// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/eval/routing_eval.hpp"

#include <fstream>
#include <sstream>

#include "stone_needle/core/hashing.hpp"
#include "stone_needle/error.hpp"

namespace stone_needle::eval {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::FixtureParseError, what); }

Query parse_stub(const Json& j, const std::string& tag) {
  if (!j.is_object()) bad(tag + ": expected an object");
  Query q;
  if (auto it = j.find("text"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) bad(tag + ": 'text' must be a string or null");
    q.text = it->get<std::string>();
  }
  if (auto it = j.find("modalities"); it != j.end()) {
    if (!it->is_array()) bad(tag + ": 'modalities' must be an array");
    std::size_t n = 0;
    for (const auto& m : *it) {
      auto modality = m.is_string() ? parse_modality(m.get<std::string>()) : std::nullopt;
      if (!modality) bad(tag + ": unknown modality " + m.dump());
      Resource r;
      r.modality = *modality;
      r.media_type = std::string(to_string(*modality)) + "/x-fixture";
      r.id = sha256_hex(tag + "#" + std::to_string(n++));
      r.byte_length = 1;
      q.resources.push_back(std::move(r));
    }
  }
  if (!is_valid_query(q)) bad(tag + ": query needs text or modalities");
  return q;
}

}  // namespace

RoutingFixture parse_fixture(const Json& doc) {
  if (!doc.is_array()) bad("fixture must be a JSON array of cases");
  RoutingFixture fixture;
  for (std::size_t c = 0; c < doc.size(); ++c) {
    const auto& j = doc[c];
    auto tag = "case " + std::to_string(c);
    if (!j.is_object() || !j.contains("query")) bad(tag + ": needs a 'query'");

    RoutingCase rc;
    rc.query = parse_stub(j["query"], tag + " query");
    rc.history.session_id = "fixture-" + std::to_string(c);
    if (auto it = j.find("history"); it != j.end()) {
      if (!it->is_array()) bad(tag + ": 'history' must be an array");
      for (std::size_t k = 0; k < it->size(); ++k) {
        TurnRecord t;
        t.index = k + 1;
        t.query = parse_stub((*it)[k], tag + " turn " + std::to_string(k + 1));
        t.response.text = "ok";
        rc.history.turns.push_back(std::move(t));
      }
    }
    if (!j.contains("expected")) bad(tag + ": needs 'expected' (model id or null)");
    if (!j["expected"].is_null()) {
      if (!j["expected"].is_string()) bad(tag + ": 'expected' must be a string or null");
      rc.expected = j["expected"].get<std::string>();
    }
    fixture.cases.push_back(std::move(rc));
  }
  return fixture;
}

RoutingFixture load_fixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Json doc = Json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) bad(path.string() + " is not valid JSON");
  return parse_fixture(doc);
}

std::string label_name(const Selection& label) { return label.value_or("NONE"); }

std::size_t ConfusionMatrix::index_of(const Selection& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return i;
  throw Error(ErrorCode::UnknownLabel, "label '" + label_name(label) + "' is not in the registry");
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t sum = 0;
  for (const auto& row : counts)
    for (auto c : row) sum += c;
  return sum;
}

ConfusionMatrix empty_matrix(const mfm::ModelRegistry& registry) {
  ConfusionMatrix cm;
  for (const auto& m : registry.models()) cm.labels.emplace_back(m.id);
  cm.labels.emplace_back(std::nullopt);
  cm.counts.assign(cm.labels.size(), std::vector<std::uint64_t>(cm.labels.size(), 0));
  return cm;
}

ConfusionMatrix run_routing_eval(const RoutingFixture& fixture, const mfm::ModelRegistry& registry,
                                 const intent::IntentConfig& config) {
  if (fixture.cases.empty()) bad("fixture has no cases");
  auto cm = empty_matrix(registry);
  // Validate every label before running anything.
  for (const auto& c : fixture.cases) cm.index_of(c.expected);

  for (const auto& c : fixture.cases) {
    auto scores = intent::score_models(c.query, c.history, registry, config);
    auto predicted = intent::select_model(scores, config.threshold);
    ++cm.counts[cm.index_of(c.expected)][cm.index_of(predicted)];
  }
  return cm;
}

}  // namespace stone_needle::eval
