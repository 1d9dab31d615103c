// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/mfm/adapter.hpp"

#include <httplib.h>

#include <thread>

#include "net/url.hpp"
#include "stone_needle/core/hashing.hpp"
#include "stone_needle/error.hpp"

namespace stone_needle::mfm {

const std::string& mock_segmentation_png() {
  static const std::string png(
      "\x89\x50\x4e\x47\x0d\x0a\x1a\x0a\x00\x00\x00\x0d\x49\x48\x44\x52\x00\x00\x00\x01"
      "\x00\x00\x00\x01\x08\x00\x00\x00\x00\x3a\x7e\x9b\x55\x00\x00\x00\x0a\x49\x44\x41"
      "\x54\x78\xda\x63\x60\x00\x00\x00\x02\x00\x01\xe5\x27\xde\xfc\x00\x00\x00\x00\x49"
      "\x45\x4e\x44\xae\x42\x60\x82",
      67);
  return png;
}

Json encode_adapter_request(const AdapterRequest& request) {
  Json resources = Json::array();
  for (const auto& p : request.resources)
    resources.push_back(Json{{"id", p.meta.id},
                             {"media_type", p.meta.media_type},
                             {"bytes_b64", base64_encode(p.bytes)}});
  return Json{{"model_id", request.model_id},
              {"text", request.text ? Json(*request.text) : Json(nullptr)},
              {"resources", std::move(resources)}};
}

Json encode_adapter_reply(const AdapterReply& reply) {
  if (reply.text) return Json{{"kind", "text"}, {"text", *reply.text}};
  Json resources = Json::array();
  for (const auto& a : reply.artifacts)
    resources.push_back(Json{{"media_type", a.media_type}, {"bytes_b64", base64_encode(a.bytes)}});
  return Json{{"kind", "resources"}, {"resources", std::move(resources)}};
}

AdapterReply decode_adapter_reply(std::string_view body) {
  auto fail = [](const std::string& why) -> AdapterReply {
    throw Error(ErrorCode::AdapterProtocolError, why);
  };

  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return fail("reply is not a JSON object");
  auto kind = j.find("kind");
  if (kind == j.end() || !kind->is_string()) return fail("reply has no string 'kind'");

  AdapterReply reply;
  if (*kind == "text") {
    auto text = j.find("text");
    if (text == j.end() || !text->is_string() || text->get<std::string>().empty())
      return fail("text reply without non-empty 'text'");
    reply.text = text->get<std::string>();
  } else if (*kind == "resources") {
    auto resources = j.find("resources");
    if (resources == j.end() || !resources->is_array() || resources->empty())
      return fail("resources reply without a non-empty 'resources' array");
    for (const auto& r : *resources) {
      if (!r.is_object() || !r.contains("media_type") || !r["media_type"].is_string() ||
          !r.contains("bytes_b64") || !r["bytes_b64"].is_string())
        return fail("malformed produced resource");
      ProducedArtifact a;
      a.media_type = r["media_type"].get<std::string>();
      try {
        a.bytes = base64_decode(r["bytes_b64"].get<std::string>());
      } catch (const std::invalid_argument& e) {
        return fail(std::string("produced resource: ") + e.what());
      }
      if (a.bytes.empty()) return fail("produced resource is empty");
      reply.artifacts.push_back(std::move(a));
    }
  } else {
    return fail("unknown reply kind '" + kind->get<std::string>() + "'");
  }
  return reply;
}

namespace {

class HttpAdapter final : public Adapter {
 public:
  explicit HttpAdapter(net::SplitUrl url) : url_(std::move(url)) {}

  AdapterReply invoke(const AdapterRequest& request, std::chrono::milliseconds timeout) override {
    httplib::Client cli(url_.origin);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);

    auto res = cli.Post(url_.path, encode_adapter_request(request).dump(), "application/json");
    if (!res) {
      auto err = res.error();
      if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout)
        throw Error(ErrorCode::AdapterTimeout,
                    "adapter '" + request.model_id + "' did not answer in time");
      throw Error(ErrorCode::AdapterUnavailable,
                  "adapter '" + request.model_id + "': " + httplib::to_string(err));
    }
    if (res->status != 200)
      throw Error(ErrorCode::AdapterProtocolError,
                  "adapter '" + request.model_id + "' returned HTTP " + std::to_string(res->status));
    return decode_adapter_reply(res->body);
  }

 private:
  net::SplitUrl url_;
};

std::string per_resource_lines(const AdapterRequest& req, const char* verb, const char* suffix) {
  std::string out;
  for (const auto& p : req.resources) {
    if (!out.empty()) out += '\n';
    out += std::string(verb) + " " + std::string(to_string(p.meta.modality)) + " " + p.meta.id +
           suffix;
  }
  return out;
}

class MockAdapter final : public Adapter {
 public:
  explicit MockAdapter(std::string name) : name_(std::move(name)) {}

  AdapterReply invoke(const AdapterRequest& req, std::chrono::milliseconds timeout) override {
    AdapterReply reply;
    if (name_ == "echo-describe") {
      reply.text = req.resources.empty()
                       ? "described text: " + req.text.value_or("")
                       : per_resource_lines(req, "described", " (width\xc3\x97height unknown)");
    } else if (name_ == "segmenter") {
      reply.artifacts.push_back({"image/png", mock_segmentation_png()});
    } else if (name_ == "transcriber") {
      reply.text = req.resources.empty()
                       ? std::string("transcribed nothing: no audio supplied")
                       : per_resource_lines(req, "transcribed", ": [mock transcript]");
    } else if (name_ == "health-index") {
      // Deterministic pseudo-index from the inputs' content ids.
      std::string seed = req.text.value_or("");
      for (const auto& p : req.resources) seed += p.meta.id;
      auto digest = sha256_hex(seed);
      auto value = std::stoul(digest.substr(0, 4), nullptr, 16) % 101;
      reply.text = "health index " + std::to_string(value) + "/100 from " +
                   std::to_string(req.resources.size()) + " resource(s)";
    } else if (name_ == "failing") {
      throw Error(ErrorCode::AdapterUnavailable, "mock adapter 'failing' always fails");
    } else if (name_ == "slow") {
      std::this_thread::sleep_for(timeout + std::chrono::milliseconds(20));
      reply.text = "too late";
    }
    return reply;
  }

 private:
  std::string name_;
};

constexpr std::string_view kMockScheme = "mock://";
constexpr std::string_view kMockNames[] = {"echo-describe", "segmenter", "transcriber",
                                           "health-index",  "failing",   "slow"};

}  // namespace

std::unique_ptr<Adapter> make_adapter(const std::string& endpoint) {
  if (endpoint.starts_with(kMockScheme)) {
    auto name = endpoint.substr(kMockScheme.size());
    for (auto known : kMockNames)
      if (name == known) return std::make_unique<MockAdapter>(name);
    throw Error(ErrorCode::AdapterUnavailable, "unknown mock adapter '" + name + "'");
  }
  auto url = net::split_url(endpoint);
  if (!url) throw Error(ErrorCode::AdapterUnavailable, "unsupported adapter endpoint '" + endpoint + "'");
  return std::make_unique<HttpAdapter>(std::move(*url));
}

}  // namespace stone_needle::mfm
