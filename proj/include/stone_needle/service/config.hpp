// SPDX-License-Identifier: Apache-2.0

// Service configuration, read from a JSON file:
//
//   {
//     "listen": { "host": "127.0.0.1", "port": 8080 },
//     "data_dir": "data",
//     "knowledge_base_path": "kb.json",
//     "ui_dir": "ui",                      (optional)
//     "intent": { "threshold": 0.25, "history_window": 3 },
//     "models": [ { "id": "segmenter", "display_name": "...",
//                   "accepted_modalities": ["image"], "endpoint": "mock://segmenter",
//                   "timeout_ms": 10000, "keywords": ["segment"],
//                   "required_modalities": ["image"],
//                   "weight_text": 1.0, "weight_modality": 1.0 } ],
//     "mlm": { "kind": "mock" | "remote_chat", "endpoint": "...", "model_name": "...",
//              "timeout_ms": 30000, "max_retries": 2, "temperature": 0.0,
//              "system_prompt": "...", "backoff_base_ms": 500 },
//     "prompt_budget": 2048
//   }
//
// Relative paths are resolved against the config file's directory.

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stone_needle/service/orchestrator.hpp"

namespace stone_needle::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir;
  std::optional<std::filesystem::path> knowledge_base_path;
  std::optional<std::filesystem::path> ui_dir;
  intent::IntentConfig intent;
  std::vector<mfm::ModelDescriptor> models;
  mlm::MlmBackend mlm;
  std::size_t prompt_budget = kDefaultPromptBudget;
};

// Throws ConfigError.
ServiceConfig parse_config(const Json& doc, const std::filesystem::path& base_dir);
ServiceConfig load_config(const std::filesystem::path& path);

// Registers the models and loads the knowledge base. Throws ConfigError,
// DuplicateModelId, KbParseError or KbAliasConflict.
std::shared_ptr<const Dependencies> build_dependencies(const ServiceConfig& config);

}  // namespace stone_needle::service
