// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/service/record_log.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "stone_needle/error.hpp"

namespace stone_needle::service {

namespace {

[[noreturn]] void fail(const std::string& what, const std::filesystem::path& path, int err) {
  throw Error(ErrorCode::PersistenceError,
              what + " " + path.string() + ": " + std::strerror(err));
}

std::uint32_t crc_of(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view in) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[i]);
  return v;
}

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }
  // Close explicitly so the error is observed.
  int release_close() {
    int rc = ::close(fd_);
    fd_ = -1;
    return rc;
  }

 private:
  int fd_;
};

void write_all(int fd, std::string_view bytes, const std::filesystem::path& path) {
  while (!bytes.empty()) {
    auto n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      fail("write", path, errno);
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

void fsync_dir(const std::filesystem::path& dir) {
  Fd d(::open(dir.c_str(), O_RDONLY | O_DIRECTORY));
  if (d.get() < 0) fail("open directory", dir, errno);
  if (::fsync(d.get()) != 0) fail("fsync directory", dir, errno);
}

}  // namespace

std::string encode_frame(std::string_view record) {
  std::string frame;
  frame.reserve(record.size() + 8);
  put_u32(frame, static_cast<std::uint32_t>(record.size()));
  put_u32(frame, crc_of(record));
  frame.append(record);
  return frame;
}

LogContents read_record_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("open", path, errno ? errno : ENOENT);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();

  LogContents out;
  std::string_view rest(data);
  while (!rest.empty()) {
    if (rest.size() < 8) {
      out.torn_tail = true;
      break;
    }
    auto len = get_u32(rest);
    auto crc = get_u32(rest.substr(4));
    if (rest.size() - 8 < len) {
      out.torn_tail = true;
      break;
    }
    auto payload = rest.substr(8, len);
    if (crc_of(payload) != crc) {
      out.torn_tail = true;
      break;
    }
    out.records.emplace_back(payload);
    out.valid_bytes += 8 + len;
    rest.remove_prefix(8 + len);
  }
  return out;
}

void create_record_log(const std::filesystem::path& path, std::string_view first_record) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) fail("create directory", path.parent_path(), ec.value());

  Fd fd(::open(path.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644));
  if (fd.get() < 0) fail("create", path, errno);
  write_all(fd.get(), encode_frame(first_record), path);
  if (::fsync(fd.get()) != 0) fail("fsync", path, errno);
  if (fd.release_close() != 0) fail("close", path, errno);
  fsync_dir(path.parent_path());
}

std::uint64_t append_record(const std::filesystem::path& path, std::uint64_t expected_size,
                            std::string_view record) {
  Fd fd(::open(path.c_str(), O_WRONLY | O_CLOEXEC));
  if (fd.get() < 0) fail("open", path, errno);

  struct stat st {};
  if (::fstat(fd.get(), &st) != 0) fail("stat", path, errno);
  if (static_cast<std::uint64_t>(st.st_size) != expected_size &&
      ::ftruncate(fd.get(), static_cast<off_t>(expected_size)) != 0)
    fail("truncate", path, errno);
  if (::lseek(fd.get(), static_cast<off_t>(expected_size), SEEK_SET) < 0) fail("seek", path, errno);

  auto frame = encode_frame(record);
  try {
    write_all(fd.get(), frame, path);
    if (::fsync(fd.get()) != 0) fail("fsync", path, errno);
  } catch (...) {
    // Leave the file at its committed size; best effort.
    [[maybe_unused]] int rc = ::ftruncate(fd.get(), static_cast<off_t>(expected_size));
    throw;
  }
  if (fd.release_close() != 0) fail("close", path, errno);
  return expected_size + frame.size();
}

}  // namespace stone_needle::service
