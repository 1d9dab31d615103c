// SPDX-License-Identifier: Apache-2.0

// Adapter boundary for task models. Remote adapters speak a small JSON-over-HTTP
// protocol; built-in mocks are addressed as mock://<name>.

#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stone_needle/core/resource.hpp"
#include "stone_needle/core/serialize.hpp"

namespace stone_needle::mfm {

struct AdapterPayload {
  Resource meta;
  std::string bytes;
};

struct AdapterRequest {
  std::string model_id;
  std::optional<std::string> text;
  std::vector<AdapterPayload> resources;
};

struct ProducedArtifact {
  std::string media_type;
  std::string bytes;
};

// Exactly one of text / artifacts is populated.
struct AdapterReply {
  std::optional<std::string> text;
  std::vector<ProducedArtifact> artifacts;
};

class Adapter {
 public:
  virtual ~Adapter() = default;
  // Throws AdapterTimeout, AdapterProtocolError or AdapterUnavailable.
  virtual AdapterReply invoke(const AdapterRequest& request,
                              std::chrono::milliseconds timeout) = 0;
};

// Selects the adapter by endpoint scheme. Unknown mock names and unsupported
// schemes raise AdapterUnavailable.
std::unique_ptr<Adapter> make_adapter(const std::string& endpoint);

// Wire helpers, exposed for protocol tests and stub servers.
Json encode_adapter_request(const AdapterRequest& request);
// Throws AdapterProtocolError on any non-conforming body.
AdapterReply decode_adapter_reply(std::string_view body);
Json encode_adapter_reply(const AdapterReply& reply);

// The 1x1 PNG emitted by mock://segmenter.
const std::string& mock_segmentation_png();

}  // namespace stone_needle::mfm
