// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/service/blob_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "stone_needle/core/hashing.hpp"
#include "stone_needle/core/serialize.hpp"
#include "stone_needle/error.hpp"

namespace stone_needle::service {

namespace fs = std::filesystem;

namespace {

void write_file_atomically(const fs::path& target, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  auto tmp = target;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);

  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0)
    throw Error(ErrorCode::PersistenceError, "create " + tmp.string() + ": " + std::strerror(errno));
  bool ok = true;
  std::string_view rest = bytes;
  while (ok && !rest.empty()) {
    auto n = ::write(fd, rest.data(), rest.size());
    if (n < 0 && errno == EINTR) continue;
    ok = n > 0;
    if (ok) rest.remove_prefix(static_cast<std::size_t>(n));
  }
  ok = ok && ::fsync(fd) == 0;
  ok = (::close(fd) == 0) && ok;
  if (!ok || std::rename(tmp.c_str(), target.c_str()) != 0) {
    int err = errno;
    fs::remove(tmp);
    throw Error(ErrorCode::PersistenceError, "write " + target.string() + ": " + std::strerror(err));
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::PersistenceError, "cannot read " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path meta_path(fs::path blob) {
  blob += ".meta";
  return blob;
}

}  // namespace

BlobStore::BlobStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::PersistenceError, "create " + root_.string() + ": " + ec.message());
}

fs::path BlobStore::blob_path(std::string_view id) const {
  return root_ / std::string(id.substr(0, 2)) / std::string(id);
}

Resource BlobStore::put(std::string_view bytes, std::string_view media_type,
                        ResourceOrigin origin) {
  auto r = make_resource(bytes, media_type, origin);
  if (auto existing = find(r.id)) return *existing;

  auto path = blob_path(r.id);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec)
    throw Error(ErrorCode::PersistenceError, "create " + path.parent_path().string() + ": " + ec.message());
  // Payload first: a visible .meta always has its bytes.
  write_file_atomically(path, bytes);
  write_file_atomically(meta_path(path), Json(r).dump());
  return r;
}

std::string BlobStore::read(std::string_view id) const {
  if (!is_resource_id(id) || !find(id))
    throw Error(ErrorCode::UnknownResource, "no resource " + std::string(id));
  return slurp(blob_path(id));
}

std::optional<Resource> BlobStore::find(std::string_view id) const {
  if (!is_resource_id(id)) return std::nullopt;
  auto meta = meta_path(blob_path(id));
  std::error_code ec;
  if (!fs::exists(meta, ec)) return std::nullopt;
  Json j = Json::parse(slurp(meta), nullptr, false);
  if (j.is_discarded())
    throw Error(ErrorCode::PersistenceError, "corrupt metadata " + meta.string());
  return j.get<Resource>();
}

}  // namespace stone_needle::service
