// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sys/stat.h>
#include <unistd.h>

#include <cstdlib>
#include <thread>

#include "e2e_script.hpp"
#include "generators.hpp"
#include "fallback_oracle.hpp"
#include "stone_needle/core/hashing.hpp"
#include "stone_needle/error.hpp"
#include "stone_needle/service/blob_store.hpp"
#include "stone_needle/service/config.hpp"
#include "stone_needle/service/orchestrator.hpp"
#include "stone_needle/service/record_log.hpp"
#include "stone_needle/service/session_store.hpp"
#include "test_support.hpp"

using namespace stone_needle;
using namespace stone_needle::service;
namespace fs = std::filesystem;

namespace {

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

bool running_as_root() { return ::geteuid() == 0; }

std::size_t count_files(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) ++n;
  return n;
}

}  // namespace

TEST_CASE("record log frames and torn tails") {
  testing::TempDir tmp;
  auto path = tmp.path() / "x.log";
  create_record_log(path, "first");
  auto size = append_record(path, fs::file_size(path), "second");
  CHECK(size == fs::file_size(path));
  CHECK(size == encode_frame("first").size() + encode_frame("second").size());

  // Frame layout: length and crc32 little-endian. crc32("first") computed with
  // Python's zlib.crc32.
  auto frame = encode_frame("first");
  CHECK(frame.size() == 13);
  CHECK(frame.substr(0, 4) == std::string("\x05\x00\x00\x00", 4));
  CHECK(frame.substr(8) == "first");

  auto full = testing::read_file(path);
  for (std::size_t cut = 0; cut < full.size(); ++cut) {
    testing::write_file(path, full.substr(0, cut));
    auto c = read_record_log(path);
    auto first_len = encode_frame("first").size();
    CHECK(c.records.size() == (cut >= first_len ? 1u : 0u));
    CHECK(c.torn_tail == (cut != 0 && cut != first_len));
  }

  // Corrupt payload byte: the frame is rejected by its checksum.
  auto corrupt = full;
  corrupt[full.size() - 1] ^= 0x20;
  testing::write_file(path, corrupt);
  auto c = read_record_log(path);
  CHECK(c.records == std::vector<std::string>{"first"});
  CHECK(c.torn_tail);

  // The next append cuts the bad tail.
  auto new_size = append_record(path, c.valid_bytes, "third");
  auto again = read_record_log(path);
  CHECK(again.records == std::vector<std::string>{"first", "third"});
  CHECK_FALSE(again.torn_tail);
  CHECK(new_size == fs::file_size(path));

  CHECK(code_of([&] { create_record_log(path, "dup"); }) == ErrorCode::PersistenceError);
}

TEST_CASE("blob store") {
  testing::TempDir tmp;
  BlobStore store(tmp.path() / "blobs");
  auto a = store.put("png bytes", "image/png", ResourceOrigin::UserUpload);
  auto b = store.put("png bytes", "image/png", ResourceOrigin::UserUpload);
  CHECK(a == b);
  CHECK(a.modality == Modality::Image);
  CHECK(fs::exists(store.blob_path(a.id)));
  CHECK(store.blob_path(a.id).parent_path().filename() == a.id.substr(0, 2));
  // One payload plus its metadata sidecar.
  CHECK(count_files(tmp.path() / "blobs") == 2);
  CHECK(store.read(a.id) == "png bytes");
  CHECK(store.find(a.id) == a);
  CHECK(code_of([&] { store.put("doc", "application/pdf", ResourceOrigin::UserUpload); }) ==
        ErrorCode::UnsupportedMediaType);
  CHECK(code_of([&] { store.put("", "image/png", ResourceOrigin::UserUpload); }) ==
        ErrorCode::EmptyPayload);
  CHECK(code_of([&] { store.read(resource_id("absent")); }) == ErrorCode::UnknownResource);
  CHECK_FALSE(store.find("../../etc/passwd"));

  // A second store over the same root sees the blob.
  BlobStore reopened(tmp.path() / "blobs");
  CHECK(reopened.find(a.id) == a);
}

TEST_CASE("session store basics") {
  testing::TempDir tmp;
  SessionStore store(tmp.path() / "sessions");
  auto s1 = store.create();
  auto s2 = store.create();
  CHECK(s1.session_id != s2.session_id);
  CHECK(s1.history.turns.empty());
  CHECK(s1.history.session_id == s1.session_id);
  CHECK(is_valid_session_id(s1.session_id));
  CHECK(s1.session_id.size() == 36);
  CHECK(s1.session_id[14] == '4');
  CHECK(store.exists(s1.session_id));
  CHECK_FALSE(store.exists("nope"));
  CHECK_FALSE(store.exists("../x"));
  CHECK(code_of([&] { store.snapshot("nope"); }) == ErrorCode::SessionNotFound);

  SUBCASE("wrong index is refused") {
    auto lock = store.lock_for_turn(s1.session_id);
    TurnRecord t;
    t.index = 2;
    t.query.text = "x";
    CHECK_THROWS_AS(store.commit_turn(lock, t), std::logic_error);
  }
}

TEST_CASE("unwritable store raises PersistenceError") {
  if (running_as_root()) {
    // Permission bits do not stop root; use a path blocked by a regular file.
    testing::TempDir tmp;
    testing::write_file(tmp.path() / "blocker", "x");
    CHECK(code_of([&] { SessionStore s(tmp.path() / "blocker" / "sessions"); s.create(); }) ==
          ErrorCode::PersistenceError);
  } else {
    testing::TempDir tmp;
    fs::create_directories(tmp.path() / "sessions");
    fs::permissions(tmp.path() / "sessions", fs::perms::owner_read | fs::perms::owner_exec);
    SessionStore s(tmp.path() / "sessions");
    CHECK(code_of([&] { s.create(); }) == ErrorCode::PersistenceError);
  }
}

namespace {

std::shared_ptr<Dependencies> small_deps() {
  auto deps = std::make_shared<Dependencies>(*e2e::dependencies());
  return deps;
}

}  // namespace

TEST_CASE("execute_turn branches") {
  auto deps = small_deps();
  InMemoryResourceStore store;
  auto now = parse_utc("2024-01-01T00:00:00Z");

  SUBCASE("greeting goes to no model") {
    auto out = execute_turn({}, Query{"hello", {}}, *deps, store, now);
    CHECK_FALSE(out.response.routing_trace.selected);
    auto p = prompt::assemble_prompt({}, Query{"hello", {}}, {}, deps->kb, deps->prompt_budget);
    CHECK(out.response.text == mlm::mock_response(p));
    CHECK(out.response.routing_trace.prompt_id == p.prompt_id);
    CHECK(out.record.index == 1);
    CHECK(out.record.timestamp == now);
    CHECK_FALSE(out.record.routed_model);
  }
  SUBCASE("segment turn then text-only fallback") {
    auto img = store.put("scan", "image/png", ResourceOrigin::UserUpload);
    auto t1 = execute_turn({}, Query{"segment this scan", {img}}, *deps, store, now);
    CHECK(t1.response.routing_trace.selected == Selection("seg"));
    REQUIRE(t1.response.resources.size() == 1);
    CHECK(t1.response.resources[0].origin == ResourceOrigin::ModelProduced);

    DialogueHistory h;
    h.session_id = "s";
    h.turns.push_back(t1.record);
    Query q{"what does the scan show", {}};
    auto t2 = execute_turn(h, q, *deps, store, now);
    CHECK(t2.response.routing_trace.selected == Selection("describe"));
    auto want = oracle::naive_fallback(q, h, {Modality::Image});
    CHECK(want.turn == 1u);
    CHECK(t2.response.routing_trace.fallback_turn_index == want.turn);
    CHECK(t2.record.index == 2);
  }
  SUBCASE("adapter failure degrades") {
    auto out = execute_turn({}, Query{"vitals", {}}, *deps, store, now);
    const auto& tr = out.response.routing_trace;
    CHECK(tr.selected == Selection("hidx"));
    REQUIRE(tr.notes.size() == 1);
    CHECK(tr.notes[0].rfind("adapter hidx failed: ", 0) == 0);
    CHECK(out.response.text);
  }
  SUBCASE("language model failure degrades") {
    auto degraded = e2e::degraded_dependencies();
    auto out = execute_turn({}, Query{"hello", {}}, *degraded, store, now);
    CHECK(out.response.text == std::string(mlm::kDegradedText));
    REQUIRE(out.response.routing_trace.notes.size() == 1);
    CHECK(out.response.routing_trace.notes[0].rfind("language model failed: ", 0) == 0);
  }
  SUBCASE("trace keys equal registry ids") {
    std::mt19937 rng(1);
    for (int i = 0; i < 30; ++i) {
      auto q = gen::random_query(rng);
      q.resources.clear();
      if (!q.text) q.text = "x";
      auto out = execute_turn({}, q, *deps, store, now);
      std::vector<std::string> keys;
      for (const auto& [id, p] : out.response.routing_trace.scores) keys.push_back(id);
      CHECK(keys == std::vector<std::string>{"seg", "describe", "asr", "hidx"});
    }
  }
  SUBCASE("invalid query propagates") {
    CHECK(code_of([&] { execute_turn({}, Query{"  ", {}}, *deps, store, now); }) ==
          ErrorCode::InvalidQuery);
  }
}

TEST_CASE("gateway transcript, reload and atomicity") {
  testing::TempDir tmp;
  std::string id;
  std::string before;
  {
    Gateway gw(tmp.path(), small_deps());
    id = gw.create_session().session_id;
    for (const char* text : {"hello", "I have a fever", "thanks"}) gw.submit_turn(id, text, {});
    auto h = gw.get_transcript(id);
    REQUIRE(h.turns.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(h.turns[i].index == i + 1);
    CHECK(code_of([&] { gw.get_transcript("missing"); }) == ErrorCode::SessionNotFound);
    CHECK(code_of([&] { gw.submit_turn("missing", "x", {}); }) == ErrorCode::SessionNotFound);
    CHECK(code_of([&] { gw.submit_turn(id, "x", {resource_id("nope")}); }) ==
          ErrorCode::UnknownResource);
    CHECK(code_of([&] { gw.submit_turn(id, std::nullopt, {}); }) == ErrorCode::InvalidQuery);
    CHECK(code_of([&] { gw.store_resource(id, "x", "application/pdf"); }) ==
          ErrorCode::UnsupportedMediaType);
    CHECK(gw.get_transcript(id).turns.size() == 3);
    before = Json(gw.session(id).history).dump();
  }
  // A new process over the same directory.
  Gateway reopened(tmp.path(), small_deps());
  CHECK(Json(reopened.session(id).history).dump() == before);
  reopened.submit_turn(id, "one more", {});
  CHECK(reopened.get_transcript(id).turns.back().index == 4);
}

TEST_CASE("persistence failure leaves history unchanged") {
  testing::TempDir tmp;
  Gateway gw(tmp.path(), small_deps());
  auto id = gw.create_session().session_id;
  gw.submit_turn(id, "first", {});
  auto log = gw.sessions().log_path(id);
  auto size = fs::file_size(log);

  // Replace the log with a directory so the append cannot open it.
  fs::rename(log, tmp.path() / "moved.log");
  fs::create_directory(log);
  CHECK(code_of([&] { gw.submit_turn(id, "second", {}); }) == ErrorCode::PersistenceError);
  CHECK(gw.get_transcript(id).turns.size() == 1);
  fs::remove(log);
  fs::rename(tmp.path() / "moved.log", log);
  CHECK(fs::file_size(log) == size);

  gw.submit_turn(id, "second", {});
  auto h = gw.get_transcript(id);
  CHECK(h.turns.size() == 2);
  CHECK(h.turns[1].index == 2);
  CHECK(SessionStore::read_session(log).history == h);
}

TEST_CASE("sessions proceed concurrently and turns stay ordered") {
  testing::TempDir tmp;
  Gateway gw(tmp.path(), small_deps());
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) ids.push_back(gw.create_session().session_id);

  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&, t] {
      for (int k = 0; k < 5; ++k) gw.submit_turn(ids[t % 4], "turn " + std::to_string(k), {});
    });
  std::atomic<bool> done{false};
  std::thread reader([&] {
    while (!done)
      for (const auto& id : ids) {
        auto h = gw.get_transcript(id);
        CHECK(has_consecutive_indices(h));
      }
  });
  for (auto& th : threads) th.join();
  done = true;
  reader.join();

  for (const auto& id : ids) {
    auto h = gw.get_transcript(id);
    CHECK(h.turns.size() == 10);
    CHECK(has_consecutive_indices(h));
    CHECK(SessionStore::read_session(gw.sessions().log_path(id)).history == h);
  }
}

TEST_CASE("uploads are recorded with the session") {
  testing::TempDir tmp;
  Gateway gw(tmp.path(), small_deps());
  auto id = gw.create_session().session_id;
  auto r = gw.store_resource(id, "audio", "audio/wav");
  CHECK(r.modality == Modality::Audio);
  CHECK(gw.session(id).resource_ids.count(r.id) == 1);
  CHECK(SessionStore::read_session(gw.sessions().log_path(id)).resource_ids.count(r.id) == 1);
  CHECK(code_of([&] { gw.store_resource("missing", "a", "audio/wav"); }) ==
        ErrorCode::SessionNotFound);
}

TEST_CASE("config parsing") {
  testing::TempDir tmp;
  fs::copy_file(testing::test_data("fixtures/kb.json"), tmp.path() / "kb.json");
  auto doc = Json::parse(R"({
    "listen": {"host": "0.0.0.0", "port": 9000},
    "data_dir": "data",
    "knowledge_base_path": "kb.json",
    "intent": {"threshold": 0.4, "history_window": 2},
    "models": [
      {"id": "seg", "display_name": "Segmenter", "accepted_modalities": ["image"],
       "endpoint": "mock://segmenter", "timeout_ms": 1500, "keywords": ["segment"],
       "required_modalities": ["image"], "weight_text": 1.0, "weight_modality": 0.5}
    ],
    "mlm": {"kind": "remote_chat", "endpoint": "http://localhost:1/v1/chat/completions",
            "model_name": "gpt", "timeout_ms": 2000, "max_retries": 1, "temperature": 0.2,
            "system_prompt": "sys", "backoff_base_ms": 10},
    "prompt_budget": 512
  })");
  auto cfg = parse_config(doc, tmp.path());
  CHECK(cfg.host == "0.0.0.0");
  CHECK(cfg.port == 9000);
  CHECK(cfg.data_dir == tmp.path() / "data");
  CHECK(cfg.intent.threshold == 0.4);
  CHECK(cfg.intent.history_window == 2);
  REQUIRE(cfg.models.size() == 1);
  CHECK(cfg.models[0].timeout == std::chrono::milliseconds(1500));
  CHECK(cfg.models[0].routing_signal.weight_modality == 0.5);
  CHECK(cfg.mlm.kind == mlm::BackendKind::RemoteChat);
  CHECK(cfg.mlm.max_retries == 1);
  CHECK(cfg.mlm.backoff_base == std::chrono::milliseconds(10));
  CHECK(cfg.prompt_budget == 512);
  auto deps = build_dependencies(cfg);
  CHECK(deps->registry.size() == 1);
  CHECK(deps->kb.entities().size() == 10);

  auto minimal = parse_config(
      Json::parse(R"({"data_dir": "/tmp/x", "models": [{"id": "d", "accepted_modalities": ["image"],
                      "endpoint": "mock://echo-describe", "keywords": ["describe"]}]})"),
      tmp.path());
  CHECK(minimal.port == 8080);
  CHECK(minimal.mlm.kind == mlm::BackendKind::MockTemplated);
  CHECK(minimal.intent.threshold == 0.25);
  CHECK(minimal.intent.history_window == 3);

  CHECK(code_of([&] { parse_config(Json::parse("{}"), tmp.path()); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { parse_config(Json::parse(R"({"data_dir": "d"})"), tmp.path()); }) ==
        ErrorCode::ConfigError);
  // Each patch breaks one field of an otherwise valid document.
  for (const char* patch : {
           R"({"data_dir": 5})",
           R"({"prompt_budget": 0})",
           R"({"intent": {"threshold": 1.5}})",
           R"({"intent": {"history_window": -1}})",
           R"({"mlm": {"endpoint": null}})",
           R"({"mlm": {"kind": "telepathy"}})",
           R"({"listen": {"port": 70000}})",
           R"({"models": [{"id": "x"}]})",
           R"({"models": [{"id": "x", "accepted_modalities": ["smell"], "endpoint": "mock://segmenter"}]})",
       }) {
    std::string what = patch;
    CAPTURE(what);
    auto bad = doc;
    bad.merge_patch(Json::parse(patch));
    CHECK(code_of([&] { parse_config(bad, tmp.path()); }) == ErrorCode::ConfigError);
  }

  auto upper = doc;
  upper["models"][0]["keywords"] = Json::array({"UPPER"});
  CHECK(code_of([&] { build_dependencies(parse_config(upper, tmp.path())); }) ==
        ErrorCode::ConfigError);

  auto dup = doc;
  dup["models"].push_back(doc["models"][0]);
  CHECK(code_of([&] { build_dependencies(parse_config(dup, tmp.path())); }) ==
        ErrorCode::DuplicateModelId);

  testing::write_file(tmp.path() / "cfg.json", doc.dump());
  CHECK(load_config(tmp.path() / "cfg.json").port == 9000);
  testing::write_file(tmp.path() / "broken.json", "{");
  CHECK(code_of([&] { load_config(tmp.path() / "broken.json"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { load_config(tmp.path() / "absent.json"); }) == ErrorCode::ConfigError);
}

TEST_CASE("end-to-end script matches the golden transcript") {
  testing::TempDir tmp;
  auto got = e2e::run_script(tmp.path());
  auto path = testing::test_data("golden/e2e_transcript.json");
  if (std::getenv("STONE_NEEDLE_UPDATE_GOLDEN")) testing::write_file(path, got);
  CHECK(testing::read_file(path) == got);

  testing::TempDir again;
  CHECK(e2e::run_script(again.path()) == got);
}
