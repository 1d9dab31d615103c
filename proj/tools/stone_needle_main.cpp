// SPDX-License-Identifier: Apache-2.0

// stone-needle: serve | chat | eval | kb-lint

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

#include "stone_needle/error.hpp"
#include "stone_needle/eval/metrics.hpp"
#include "stone_needle/prompt/knowledge_base.hpp"
#include "stone_needle/service/config.hpp"
#include "stone_needle/service/gateway.hpp"
#include "stone_needle/service/http_api.hpp"

namespace sn = stone_needle;
namespace fs = std::filesystem;

namespace {

int serve(const fs::path& config_path) {
  auto config = sn::service::load_config(config_path);
  sn::service::Gateway gateway(config.data_dir, sn::service::build_dependencies(config));
  sn::service::HttpApi api(gateway, config.ui_dir);

  // Block termination signals everywhere; one thread waits for them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  int port = api.bind(config.host, config.port);
  if (port < 0) {
    std::cerr << "cannot bind " << config.host << ":" << config.port << "\n";
    return 1;
  }
  std::cout << "listening on http://" << config.host << ":" << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    api.stop();
  });
  bool ok = api.run();
  // run() also returns on a listen failure; wake the waiter in that case.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return ok ? 0 : 1;
}

std::string guess_media_type(const fs::path& p) {
  auto ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const std::pair<const char*, const char*> kTypes[] = {
      {".png", "image/png"},   {".jpg", "image/jpeg"},  {".jpeg", "image/jpeg"},
      {".gif", "image/gif"},   {".bmp", "image/bmp"},   {".dcm", "image/dicom"},
      {".wav", "audio/wav"},   {".mp3", "audio/mpeg"},  {".ogg", "audio/ogg"},
      {".flac", "audio/flac"}, {".mp4", "video/mp4"},   {".webm", "video/webm"},
      {".mov", "video/quicktime"}, {".txt", "text/plain"},
  };
  for (auto [e, t] : kTypes)
    if (ext == e) return t;
  return "application/octet-stream";
}

void print_trace(const sn::RoutingTrace& t) {
  std::cout << "  trace: selected=" << t.selected.value_or("none");
  if (t.fallback_turn_index) std::cout << " fallback_turn=" << *t.fallback_turn_index;
  std::cout << " prompt=" << t.prompt_id << "\n  scores:";
  for (const auto& [id, p] : t.scores) std::cout << " " << id << "=" << p;
  std::cout << "\n";
  for (const auto& n : t.notes) std::cout << "  note: " << n << "\n";
}

int chat(const fs::path& config_path, bool verbose) {
  auto config = sn::service::load_config(config_path);
  sn::service::Gateway gateway(config.data_dir, sn::service::build_dependencies(config));
  auto session = gateway.create_session();
  std::cout << "session " << session.session_id
            << " (type text to send, /attach <file> to add a file, /quit to leave)\n";

  std::vector<std::string> pending;
  std::string line;
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    if (line == "/quit" || line == "/exit") break;
    try {
      if (line.starts_with("/attach ")) {
        fs::path file = line.substr(8);
        std::ifstream in(file, std::ios::binary);
        if (!in) {
          std::cout << "cannot open " << file << "\n";
          continue;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        auto r = gateway.store_resource(session.session_id, buf.str(), guess_media_type(file));
        pending.push_back(r.id);
        std::cout << "attached " << sn::to_string(r.modality) << " " << r.id << "\n";
        continue;
      }
      std::optional<std::string> text;
      if (!line.empty()) text = line;
      if (!text && pending.empty()) continue;
      auto response = gateway.submit_turn(session.session_id, text, pending);
      pending.clear();
      std::cout << response.text.value_or("") << "\n";
      for (const auto& r : response.resources)
        std::cout << "  [" << sn::to_string(r.modality) << " " << r.media_type << " "
                  << (config.data_dir / "blobs" / r.id.substr(0, 2) / r.id).string() << "]\n";
      if (verbose) print_trace(response.routing_trace);
    } catch (const sn::Error& e) {
      std::cout << "error: " << e.what() << "\n";
    }
  }
  return 0;
}

int eval(const fs::path& fixtures, const fs::path& config_path, const std::string& format,
         const std::optional<fs::path>& out_path) {
  auto config = sn::service::load_config(config_path);
  sn::mfm::ModelRegistry registry;
  for (const auto& m : config.models) registry.register_model(m);

  auto fixture = sn::eval::load_fixture(fixtures);
  auto cm = sn::eval::run_routing_eval(fixture, registry, config.intent);
  auto metrics = sn::eval::compute_metrics(cm);
  auto report = format == "json" ? sn::eval::metrics_json(cm, metrics).dump(2) + "\n"
                                 : sn::eval::metrics_table(cm, metrics);
  if (out_path) {
    std::ofstream out(*out_path, std::ios::binary);
    if (!(out << report)) {
      std::cerr << "cannot write " << *out_path << "\n";
      return 1;
    }
  } else {
    std::cout << report;
  }
  return 0;
}

int kb_lint(const fs::path& kb_path) {
  std::ifstream in(kb_path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot open " << kb_path << "\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  auto doc = sn::Json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) {
    std::cout << kb_path.string() << ": not valid JSON\n";
    return 1;
  }
  auto problems = sn::prompt::lint_knowledge_base(doc);
  for (const auto& p : problems) std::cout << kb_path.string() << ": " << p << "\n";
  if (!problems.empty()) return 1;

  auto kb = sn::prompt::KnowledgeBase::from_json(doc);
  std::cout << kb_path.string() << ": ok, " << kb.entities().size() << " entities, "
            << kb.alias_index().size() << " aliases\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal dialogue orchestration gateway"};
  app.require_subcommand(1);

  fs::path config_path;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP gateway");
  serve_cmd->add_option("--config", config_path, "Service config (JSON)")->required();

  bool verbose = false;
  auto* chat_cmd = app.add_subcommand("chat", "Terminal chat against an in-process gateway");
  chat_cmd->add_option("--config", config_path, "Service config (JSON)")->required();
  chat_cmd->add_flag("--verbose", verbose, "Print the routing trace after each turn");

  fs::path fixtures;
  std::string format = "table";
  std::optional<fs::path> out_path;
  auto* eval_cmd = app.add_subcommand("eval", "Score routing decisions against a labeled fixture");
  eval_cmd->add_option("--fixtures", fixtures, "Routing fixture (JSON)")->required();
  eval_cmd->add_option("--config", config_path, "Service config (JSON)")->required();
  eval_cmd->add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));
  eval_cmd->add_option("--out", out_path, "Write the report here instead of stdout");

  fs::path kb_path;
  auto* lint_cmd = app.add_subcommand("kb-lint", "Validate a knowledge-base file");
  lint_cmd->add_option("kb", kb_path, "Knowledge base (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(config_path);
    if (*chat_cmd) return chat(config_path, verbose);
    if (*eval_cmd) return eval(fixtures, config_path, format, out_path);
    if (*lint_cmd) return kb_lint(kb_path);
  } catch (const std::exception& e) {
    std::cerr << "stone-needle: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
