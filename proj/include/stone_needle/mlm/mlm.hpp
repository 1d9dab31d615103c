// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "stone_needle/core/serialize.hpp"
#include "stone_needle/prompt/prompt.hpp"

namespace stone_needle::mlm {

enum class BackendKind { RemoteChat, MockTemplated };

inline constexpr std::string_view kDefaultSystemPrompt = "You are a careful medical assistant.";
inline constexpr std::string_view kDegradedText = "[assistant unavailable]";

struct MlmBackend {
  BackendKind kind = BackendKind::MockTemplated;
  std::optional<std::string> endpoint;  // full chat-completions URL
  std::optional<std::string> model_name;
  std::chrono::milliseconds timeout{30'000};
  unsigned max_retries = 2;
  double temperature = 0.0;
  std::string system_prompt{kDefaultSystemPrompt};
  std::chrono::milliseconds backoff_base{500};
};

// Throws ConfigError when a RemoteChat backend lacks endpoint or model name.
void validate(const MlmBackend& backend);

// "MOCK-RESPONSE sections=<tags> sha=<8 hex of sha-256(rendered)>"
std::string mock_response(const prompt::AssembledPrompt& prompt);

// OpenAI-compatible chat-completion request body.
Json chat_request_body(const MlmBackend& backend, const prompt::AssembledPrompt& prompt);

// Throws MlmTimeout, MlmProtocolError or MlmUnavailable. The bearer token is
// read from MLM_API_KEY at call time.
std::string generate(const MlmBackend& backend, const prompt::AssembledPrompt& prompt);

}  // namespace stone_needle::mlm
