// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/service/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "stone_needle/error.hpp"

namespace stone_needle::service {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

ModalitySet parse_modalities(const Json& arr, const std::string& where) {
  if (!arr.is_array()) bad(where + " must be an array of modality names");
  ModalitySet out;
  for (const auto& m : arr) {
    auto parsed = m.is_string() ? parse_modality(m.get<std::string>()) : std::nullopt;
    if (!parsed) bad(where + ": unknown modality " + m.dump());
    out.insert(*parsed);
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

mfm::ModelDescriptor parse_model(const Json& m) {
  if (!m.is_object() || !m.contains("id") || !m["id"].is_string()) bad("model entry needs an 'id'");
  mfm::ModelDescriptor d;
  d.id = m["id"].get<std::string>();
  auto where = "model '" + d.id + "'";
  d.display_name = m.value("display_name", d.id);
  if (!m.contains("accepted_modalities")) bad(where + " needs 'accepted_modalities'");
  d.accepted_modalities = parse_modalities(m["accepted_modalities"], where + " accepted_modalities");
  if (!m.contains("endpoint") || !m["endpoint"].is_string()) bad(where + " needs an 'endpoint'");
  d.endpoint = m["endpoint"].get<std::string>();
  d.timeout = std::chrono::milliseconds(m.value("timeout_ms", mfm::kDefaultAdapterTimeout.count()));

  auto& sig = d.routing_signal;
  sig.keywords = m.value("keywords", std::vector<std::string>{});
  if (m.contains("required_modalities"))
    sig.required_modalities =
        parse_modalities(m["required_modalities"], where + " required_modalities");
  sig.weight_text = m.value("weight_text", 1.0);
  sig.weight_modality = m.value("weight_modality", 1.0);
  return d;
}

mlm::MlmBackend parse_mlm(const Json& j) {
  mlm::MlmBackend b;
  auto kind = j.value("kind", std::string("mock"));
  if (kind == "mock") {
    b.kind = mlm::BackendKind::MockTemplated;
  } else if (kind == "remote_chat") {
    b.kind = mlm::BackendKind::RemoteChat;
  } else {
    bad("mlm.kind must be 'mock' or 'remote_chat'");
  }
  if (j.contains("endpoint")) b.endpoint = j["endpoint"].get<std::string>();
  if (j.contains("model_name")) b.model_name = j["model_name"].get<std::string>();
  b.timeout = std::chrono::milliseconds(j.value("timeout_ms", b.timeout.count()));
  b.max_retries = j.value("max_retries", b.max_retries);
  b.temperature = j.value("temperature", b.temperature);
  b.system_prompt = j.value("system_prompt", b.system_prompt);
  b.backoff_base = std::chrono::milliseconds(j.value("backoff_base_ms", b.backoff_base.count()));
  mlm::validate(b);
  return b;
}

}  // namespace

ServiceConfig parse_config(const Json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) bad("config must be a JSON object");
  ServiceConfig c;
  try {
    if (doc.contains("listen")) {
      const auto& l = doc["listen"];
      c.host = l.value("host", c.host);
      c.port = l.value("port", c.port);
      if (c.port < 0 || c.port > 65535) bad("listen.port must be within 0..65535");
    }
    if (!doc.contains("data_dir")) bad("'data_dir' is required");
    c.data_dir = resolve(base_dir, doc["data_dir"].get<std::string>());
    if (doc.contains("knowledge_base_path"))
      c.knowledge_base_path = resolve(base_dir, doc["knowledge_base_path"].get<std::string>());
    if (doc.contains("ui_dir")) c.ui_dir = resolve(base_dir, doc["ui_dir"].get<std::string>());

    if (doc.contains("intent")) {
      const auto& i = doc["intent"];
      c.intent.threshold = i.value("threshold", c.intent.threshold);
      auto window = i.value("history_window", static_cast<long long>(c.intent.history_window));
      if (window < 0) bad("intent.history_window must be >= 0");
      c.intent.history_window = static_cast<std::size_t>(window);
    }
    if (c.intent.threshold < 0 || c.intent.threshold > 1) bad("intent.threshold must be in [0, 1]");

    if (!doc.contains("models") || !doc["models"].is_array() || doc["models"].empty())
      bad("'models' must be a non-empty array");
    std::set<std::string> ids;
    for (const auto& m : doc["models"]) {
      c.models.push_back(parse_model(m));
      if (!ids.insert(c.models.back().id).second)
        throw Error(ErrorCode::DuplicateModelId, "model '" + c.models.back().id + "' listed twice");
    }

    if (doc.contains("mlm")) c.mlm = parse_mlm(doc["mlm"]);
    auto budget = doc.value("prompt_budget", static_cast<long long>(c.prompt_budget));
    if (budget <= 0) bad("prompt_budget must be positive");
    c.prompt_budget = static_cast<std::size_t>(budget);
  } catch (const Json::exception& e) {
    bad(std::string("malformed config: ") + e.what());
  }
  return c;
}

ServiceConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Json doc = Json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) bad(path.string() + " is not valid JSON");
  return parse_config(doc, path.parent_path());
}

std::shared_ptr<const Dependencies> build_dependencies(const ServiceConfig& config) {
  auto deps = std::make_shared<Dependencies>();
  for (const auto& m : config.models) deps->registry.register_model(m);
  if (config.knowledge_base_path) deps->kb = prompt::KnowledgeBase::load(*config.knowledge_base_path);
  deps->intent = config.intent;
  deps->mlm = config.mlm;
  deps->prompt_budget = config.prompt_budget;
  return deps;
}

}  // namespace stone_needle::service
