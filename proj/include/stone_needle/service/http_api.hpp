// SPDX-License-Identifier: Apache-2.0

// REST surface of the gateway:
//
//   POST /v1/sessions                      -> 201 {"session_id"}
//   POST /v1/sessions/{id}/resources       raw body + Content-Type -> 201 {"resource_id","modality"}
//   POST /v1/sessions/{id}/turns           {"text","resource_ids"} -> 200 turn response
//   GET  /v1/sessions/{id}                 transcript
//   GET  /v1/resources/{hex}               raw bytes
//   GET  /v1/health                        {"status":"ok"}
//   GET  /ui/...                           static files when a UI directory is configured

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "stone_needle/core/serialize.hpp"
#include "stone_needle/service/gateway.hpp"

namespace stone_needle::service {

// JSON body of a successful turn.
Json turn_response_json(const Response& response);
// JSON body of GET /v1/sessions/{id}.
Json transcript_json(const Session& session);

class HttpApi {
 public:
  explicit HttpApi(Gateway& gateway, std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~HttpApi();

  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  // Binds without serving; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Serves until stop(); blocks.
  bool run();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace stone_needle::service
