// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/mlm/mlm.hpp"

#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "net/url.hpp"
#include "stone_needle/core/hashing.hpp"
#include "stone_needle/error.hpp"

namespace stone_needle::mlm {

void validate(const MlmBackend& backend) {
  if (backend.kind != BackendKind::RemoteChat) return;
  if (!backend.endpoint || !net::split_url(*backend.endpoint))
    throw Error(ErrorCode::ConfigError, "remote chat backend needs an http(s) endpoint");
  if (!backend.model_name || backend.model_name->empty())
    throw Error(ErrorCode::ConfigError, "remote chat backend needs a model name");
}

std::string mock_response(const prompt::AssembledPrompt& prompt) {
  std::string tags;
  for (const auto& s : prompt.sections) {
    if (!tags.empty()) tags += ',';
    tags += prompt::to_string(s.tag);
  }
  return "MOCK-RESPONSE sections=" + tags + " sha=" + sha256_hex(prompt.rendered).substr(0, 8);
}

Json chat_request_body(const MlmBackend& backend, const prompt::AssembledPrompt& prompt) {
  return Json{{"model", backend.model_name.value_or("")},
              {"messages", Json::array({Json{{"role", "system"}, {"content", backend.system_prompt}},
                                        Json{{"role", "user"}, {"content", prompt.rendered}}})},
              {"temperature", backend.temperature}};
}

namespace {

enum class Attempt { Ok, Transient, TransientTimeout };

struct AttemptResult {
  Attempt outcome;
  std::string text;
  std::string detail;
};

std::string parse_completion(const std::string& body) {
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::MlmProtocolError, "completion is not JSON");
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw Error(ErrorCode::MlmProtocolError, "content is not a string");
    return content.get<std::string>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::MlmProtocolError, "completion lacks choices[0].message.content");
  }
}

AttemptResult attempt_once(const MlmBackend& backend, const net::SplitUrl& url,
                           const std::string& body) {
  httplib::Client cli(url.origin);
  cli.set_connection_timeout(backend.timeout);
  cli.set_read_timeout(backend.timeout);
  cli.set_write_timeout(backend.timeout);

  httplib::Headers headers;
  if (const char* key = std::getenv("MLM_API_KEY"); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  auto res = cli.Post(url.path, headers, body, "application/json");
  if (!res) {
    auto err = res.error();
    bool timed_out = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout;
    return {timed_out ? Attempt::TransientTimeout : Attempt::Transient, {},
            httplib::to_string(err)};
  }
  if (res->status == 408 || res->status == 429 || res->status >= 500)
    return {Attempt::Transient, {}, "HTTP " + std::to_string(res->status)};
  if (res->status != 200)
    throw Error(ErrorCode::MlmProtocolError, "chat endpoint returned HTTP " +
                                                 std::to_string(res->status));
  return {Attempt::Ok, parse_completion(res->body), {}};
}

}  // namespace

std::string generate(const MlmBackend& backend, const prompt::AssembledPrompt& prompt) {
  if (prompt.rendered.empty()) throw std::invalid_argument("generate: empty prompt");
  if (backend.kind == BackendKind::MockTemplated) return mock_response(prompt);

  validate(backend);
  auto url = *net::split_url(*backend.endpoint);
  auto body = chat_request_body(backend, prompt).dump();

  auto delay = backend.backoff_base;
  AttemptResult last{Attempt::Transient, {}, {}};
  for (unsigned attempt = 0; attempt <= backend.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    last = attempt_once(backend, url, body);
    if (last.outcome == Attempt::Ok) return std::move(last.text);
  }
  auto attempts = std::to_string(backend.max_retries + 1) + " attempt(s)";
  if (last.outcome == Attempt::TransientTimeout)
    throw Error(ErrorCode::MlmTimeout, "chat endpoint timed out after " + attempts);
  throw Error(ErrorCode::MlmUnavailable, "chat endpoint failed after " + attempts + ": " + last.detail);
}

}  // namespace stone_needle::mlm
