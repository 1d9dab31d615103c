// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "fallback_enum.hpp"
#include "generators.hpp"
#include "stone_needle/core/serialize.hpp"
#include "stone_needle/error.hpp"
#include "stone_needle/mfm/adapter.hpp"
#include "stone_needle/mfm/mfm_stage.hpp"
#include "test_support.hpp"

using namespace stone_needle;
using namespace stone_needle::mfm;
using namespace std::chrono_literals;

namespace {

ModelDescriptor descriptor(std::string id, std::string endpoint,
                           ModalitySet accepted = {Modality::Image}) {
  ModelDescriptor d;
  d.id = std::move(id);
  d.display_name = d.id;
  d.accepted_modalities = accepted;
  d.routing_signal.keywords = {"scan"};
  d.endpoint = std::move(endpoint);
  d.timeout = 2s;
  return d;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::ConfigError;
}

TurnRecord turn(std::size_t index, std::vector<Resource> resources) {
  TurnRecord t;
  t.index = index;
  t.query.text = "turn " + std::to_string(index);
  t.query.resources = std::move(resources);
  t.response.text = "ok";
  return t;
}

}  // namespace

TEST_CASE("registry rejects duplicates and bad descriptors") {
  ModelRegistry reg;
  reg.register_model(descriptor("a", "mock://segmenter"));
  CHECK(code_of([&] { reg.register_model(descriptor("a", "mock://segmenter")); }) ==
        ErrorCode::DuplicateModelId);
  CHECK(code_of([&] { reg.register_model(descriptor("b", "mock://segmenter", {})); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([&] { reg.register_model(descriptor("", "mock://segmenter")); }) ==
        ErrorCode::ConfigError);
  CHECK(reg.size() == 1);
  CHECK(reg.find("a") != nullptr);
  CHECK(reg.find("b") == nullptr);
}

TEST_CASE("resolve_resources examples") {
  auto img_a = gen::stub_resource(Modality::Image, 1);
  auto img_1 = gen::stub_resource(Modality::Image, 2);
  auto aud_3 = gen::stub_resource(Modality::Audio, 3);
  ModalitySet image{Modality::Image};

  SUBCASE("current query first") {
    DialogueHistory h;
    h.turns.push_back(turn(1, {img_1}));
    auto r = resolve_resources(Query{"x", {img_a}}, h, image);
    CHECK(r.resources == std::vector<Resource>{img_a});
    CHECK_FALSE(r.fallback_turn_index);
  }
  SUBCASE("only compatible turn is the oldest") {
    DialogueHistory h;
    h.turns = {turn(1, {img_1}), turn(2, {}), turn(3, {aud_3})};
    auto r = resolve_resources(Query{"x", {}}, h, image);
    CHECK(r.resources == std::vector<Resource>{img_1});
    CHECK(r.fallback_turn_index == 1u);
  }
  SUBCASE("most recent compatible turn wins") {
    auto img_2 = gen::stub_resource(Modality::Image, 20);
    auto img_4a = gen::stub_resource(Modality::Image, 40);
    auto img_4b = gen::stub_resource(Modality::Image, 41);
    DialogueHistory h;
    h.turns = {turn(1, {}), turn(2, {img_2}), turn(3, {}), turn(4, {img_4a, aud_3, img_4b}),
               turn(5, {})};
    auto r = resolve_resources(Query{"x", {}}, h, image);
    CHECK(r.resources == std::vector<Resource>{img_4a, img_4b});
    CHECK(r.fallback_turn_index == 4u);
  }
  SUBCASE("incompatible current attachments trigger fallback") {
    DialogueHistory h;
    h.turns = {turn(1, {img_1})};
    auto r = resolve_resources(Query{"x", {aud_3}}, h, image);
    CHECK(r.fallback_turn_index == 1u);
  }
  SUBCASE("nothing anywhere") {
    DialogueHistory h;
    h.turns = {turn(1, {aud_3})};
    auto r = resolve_resources(Query{"x", {}}, h, image);
    CHECK(r.resources.empty());
    CHECK_FALSE(r.fallback_turn_index);
  }
  SUBCASE("response resources are never borrowed") {
    DialogueHistory h;
    auto t = turn(1, {});
    t.response.resources.push_back(img_1);
    h.turns = {t};
    CHECK(resolve_resources(Query{"x", {}}, h, image).resources.empty());
  }
}

TEST_CASE("resolve_resources matches the brute-force oracle on short histories") {
  auto sweep = oracle::sweep_fallback(4);
  CHECK(sweep.cases > 0);
  CHECK(sweep.mismatches == 0);
  CHECK(sweep.invariant_violations == 0);
}

TEST_CASE("mock adapters") {
  InMemoryResourceStore store;
  auto img = store.put("image-bytes", "image/png", ResourceOrigin::UserUpload);

  SUBCASE("echo-describe") {
    auto d = descriptor("describe", "mock://echo-describe");
    auto out = dispatch(d, {img}, std::string("what is this"), store);
    CHECK(out.kind == OutputKind::TextResult);
    CHECK(out.text == "described image " + img.id + " (width\xc3\x97height unknown)");
    CHECK(out.source_model == Selection("describe"));
    CHECK(dispatch(d, {img}, std::nullopt, store) == out);
  }
  SUBCASE("segmenter") {
    auto d = descriptor("seg", "mock://segmenter");
    auto out = dispatch(d, {img}, std::nullopt, store);
    CHECK(out.kind == OutputKind::ResourceResult);
    REQUIRE(out.resources.size() == 1);
    CHECK(out.resources[0].modality == Modality::Image);
    CHECK(out.resources[0].origin == ResourceOrigin::ModelProduced);
    // Digest computed with Python's hashlib over the fixture PNG.
    CHECK(out.resources[0].id ==
          "a4d4c009619311d9b83904acfd62fe3b7f918c312522bbcc6ad51cdec4fd1edf");
    CHECK(store.read(out.resources[0].id) == mock_segmentation_png());
    CHECK(describe_produced(out) ==
          "model seg produced image resource "
          "a4d4c009619311d9b83904acfd62fe3b7f918c312522bbcc6ad51cdec4fd1edf");
  }
  SUBCASE("transcriber") {
    auto aud = store.put("audio-bytes", "audio/wav", ResourceOrigin::UserUpload);
    auto d = descriptor("asr", "mock://transcriber", {Modality::Audio});
    auto out = dispatch(d, {aud}, std::nullopt, store);
    CHECK(out.text == "transcribed audio " + aud.id + ": [mock transcript]");
  }
  SUBCASE("health-index is deterministic and bounded") {
    auto d = descriptor("hidx", "mock://health-index", {Modality::Text});
    auto a = dispatch(d, {}, std::string("vitals please"), store);
    auto b = dispatch(d, {}, std::string("vitals please"), store);
    CHECK(a == b);
    REQUIRE(a.text);
    CHECK(a.text->rfind("health index ", 0) == 0);
    auto n = std::stoi(a.text->substr(13));
    CHECK(n >= 0);
    CHECK(n <= 100);
  }
  SUBCASE("failing") {
    auto d = descriptor("bad", "mock://failing");
    CHECK(code_of([&] { dispatch(d, {img}, std::nullopt, store); }) ==
          ErrorCode::AdapterUnavailable);
  }
  SUBCASE("slow") {
    auto d = descriptor("slow", "mock://slow");
    d.timeout = 30ms;
    CHECK(code_of([&] { dispatch(d, {img}, std::nullopt, store); }) == ErrorCode::AdapterTimeout);
  }
  SUBCASE("unknown mock and scheme") {
    CHECK(code_of([] { make_adapter("mock://nope"); }) == ErrorCode::AdapterUnavailable);
    CHECK(code_of([] { make_adapter("ftp://host/x"); }) == ErrorCode::AdapterUnavailable);
  }
}

TEST_CASE("adapter wire protocol") {
  Resource meta = make_resource("abc", "image/png");
  AdapterRequest req{"seg", std::string("hi"), {{meta, "abc"}}};
  auto j = encode_adapter_request(req);
  CHECK(j["model_id"] == "seg");
  CHECK(j["text"] == "hi");
  CHECK(j["resources"][0]["id"] == meta.id);
  CHECK(j["resources"][0]["media_type"] == "image/png");
  CHECK(j["resources"][0]["bytes_b64"] == "YWJj");
  CHECK(encode_adapter_request(AdapterRequest{"m", std::nullopt, {}})["text"].is_null());

  auto text = decode_adapter_reply(R"({"kind":"text","text":"fine"})");
  CHECK(text.text == "fine");
  auto res = decode_adapter_reply(
      R"({"kind":"resources","resources":[{"media_type":"image/png","bytes_b64":"YWJj"}]})");
  REQUIRE(res.artifacts.size() == 1);
  CHECK(res.artifacts[0].bytes == "abc");
  CHECK(decode_adapter_reply(encode_adapter_reply(res).dump()).artifacts[0].bytes == "abc");

  for (const char* bad : {"", "[]", "not json", R"({"kind":"text"})", R"({"kind":"other"})",
                          R"({"kind":"text","text":5})",
                          R"({"kind":"resources","resources":[]})",
                          R"({"kind":"resources","resources":[{"media_type":"image/png"}]})",
                          R"({"kind":"resources","resources":[{"media_type":"image/png","bytes_b64":"!!"}]})"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { decode_adapter_reply(bad); }) == ErrorCode::AdapterProtocolError);
  }
}

TEST_CASE("remote adapter over HTTP") {
  testing::StubServer stub;
  Json last_request;
  stub.server().Post("/text", [&](const httplib::Request& r, httplib::Response& res) {
    last_request = Json::parse(r.body);
    res.set_content(R"({"kind":"text","text":"remote says hi"})", "application/json");
  });
  stub.server().Post("/png", [](const httplib::Request&, httplib::Response& res) {
    Json body = {{"kind", "resources"},
                 {"resources", Json::array({{{"media_type", "image/png"},
                                             {"bytes_b64", base64_encode("PNGDATA")}}})}};
    res.set_content(body.dump(), "application/json");
  });
  stub.server().Post("/pdf", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(
        R"({"kind":"resources","resources":[{"media_type":"application/pdf","bytes_b64":"YWJj"}]})",
        "application/json");
  });
  stub.server().Post("/status500", [](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
  });
  stub.server().Post("/garbage", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{not json", "application/json");
  });
  stub.server().Post("/sleepy", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(400ms);
    res.set_content(R"({"kind":"text","text":"late"})", "application/json");
  });
  stub.start();

  InMemoryResourceStore store;
  auto img = store.put("img", "image/png", ResourceOrigin::UserUpload);

  auto out = dispatch(descriptor("r", stub.url("/text")), {img}, std::string("q"), store);
  CHECK(out.kind == OutputKind::TextResult);
  CHECK(out.text == "remote says hi");
  CHECK(last_request["model_id"] == "r");
  CHECK(last_request["resources"][0]["bytes_b64"] == base64_encode("img"));

  auto png = dispatch(descriptor("r", stub.url("/png")), {img}, std::nullopt, store);
  CHECK(png.kind == OutputKind::ResourceResult);
  CHECK(png.resources[0].id == resource_id("PNGDATA"));
  CHECK(png.resources[0].origin == ResourceOrigin::ModelProduced);

  CHECK(code_of([&] { dispatch(descriptor("r", stub.url("/pdf")), {img}, std::nullopt, store); }) ==
        ErrorCode::AdapterProtocolError);
  CHECK(code_of([&] {
          dispatch(descriptor("r", stub.url("/status500")), {img}, std::nullopt, store);
        }) == ErrorCode::AdapterProtocolError);
  CHECK(code_of([&] {
          dispatch(descriptor("r", stub.url("/garbage")), {img}, std::nullopt, store);
        }) == ErrorCode::AdapterProtocolError);
  CHECK(code_of([&] {
          dispatch(descriptor("r", stub.url("/missing")), {img}, std::nullopt, store);
        }) == ErrorCode::AdapterProtocolError);

  auto sleepy = descriptor("r", stub.url("/sleepy"));
  sleepy.timeout = 100ms;
  CHECK(code_of([&] { dispatch(sleepy, {img}, std::nullopt, store); }) ==
        ErrorCode::AdapterTimeout);

  auto closed = descriptor(
      "r", "http://127.0.0.1:" + std::to_string(testing::closed_port()) + "/adapter");
  CHECK(code_of([&] { dispatch(closed, {img}, std::nullopt, store); }) ==
        ErrorCode::AdapterUnavailable);
}

TEST_CASE("run_mfm_stage") {
  InMemoryResourceStore store;
  ModelRegistry reg;
  reg.register_model(descriptor("describe", "mock://echo-describe"));
  reg.register_model(descriptor("asr", "mock://transcriber", {Modality::Audio}));
  reg.register_model(descriptor("hidx", "mock://health-index", {Modality::Text}));

  auto img = store.put("scan", "image/png", ResourceOrigin::UserUpload);

  SUBCASE("NONE is Empty") {
    auto out = run_mfm_stage(std::nullopt, Query{"hi", {}}, {}, reg, store);
    CHECK(out.kind == OutputKind::Empty);
    CHECK_FALSE(out.source_model);
  }
  SUBCASE("current image") {
    auto out = run_mfm_stage(Selection("describe"), Query{"see", {img}}, {}, reg, store);
    CHECK(out.kind == OutputKind::TextResult);
    CHECK_FALSE(out.fallback_turn_index);
  }
  SUBCASE("image only in turn 2 of 5") {
    DialogueHistory h;
    for (std::size_t i = 1; i <= 5; ++i) h.turns.push_back(turn(i, i == 2 ? std::vector{img} : std::vector<Resource>{}));
    auto out = run_mfm_stage(Selection("describe"), Query{"and now?", {}}, h, reg, store);
    auto want = oracle::naive_fallback(Query{"and now?", {}}, h, {Modality::Image});
    CHECK(want.turn == 2u);
    CHECK(out.fallback_turn_index == want.turn);
    CHECK(out.kind == OutputKind::TextResult);
  }
  SUBCASE("no compatible resource") {
    auto out = run_mfm_stage(Selection("asr"), Query{"transcribe", {img}}, {}, reg, store);
    CHECK(out.kind == OutputKind::Empty);
    CHECK(out.source_model == Selection("asr"));
    CHECK(out.note == "no compatible resource");
  }
  SUBCASE("text-accepting model runs without resources") {
    auto out = run_mfm_stage(Selection("hidx"), Query{"vitals", {}}, {}, reg, store);
    CHECK(out.kind == OutputKind::TextResult);
  }
  SUBCASE("unknown model") {
    CHECK(code_of([&] { run_mfm_stage(Selection("ghost"), Query{"x", {}}, {}, reg, store); }) ==
          ErrorCode::UnknownModel);
  }
}
