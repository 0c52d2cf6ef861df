#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <mutex>

#include "reuse/error.hpp"
#include "reuse/ingest.hpp"
#include "reuse/unicode.hpp"

extern char** environ;

namespace reuse {
namespace {

std::mutex& command_mutex(const std::string& command) {
  static std::mutex registry_mutex;
  static std::map<std::string, std::unique_ptr<std::mutex>> registry;
  std::lock_guard lock(registry_mutex);
  auto& slot = registry[command];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

class TempDir {
 public:
  TempDir() {
    std::string pattern =
        (std::filesystem::temp_directory_path() / "reuse-convert-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) {
      throw Error(ErrorCode::kConversionFailed,
                  std::string("cannot create temp dir: ") + std::strerror(errno));
    }
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_shell(const std::string& command, std::string_view input) {
  TempDir dir;
  const auto in_path = dir.path() / "input";
  const auto out_path = dir.path() / "stdout";
  const auto err_path = dir.path() / "stderr";
  {
    std::ofstream in(in_path, std::ios::binary);
    in.write(input.data(), static_cast<std::streamsize>(input.size()));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 0, in_path.c_str(), O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, 1, out_path.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0600);
  posix_spawn_file_actions_addopen(&actions, 2, err_path.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0600);

  std::string sh = "/bin/sh";
  std::string flag = "-c";
  std::string cmd = command;
  char* argv[] = {sh.data(), flag.data(), cmd.data(), nullptr};
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw Error(ErrorCode::kConversionFailed,
                std::string("cannot start converter: ") + std::strerror(rc));
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) {
      throw Error(ErrorCode::kConversionFailed, "waitpid failed");
    }
  }
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  return result;
}

}  // namespace

Document external_converter_adapter(std::string_view bytes,
                                    const std::string& converter_command,
                                    std::string name) {
  if (converter_command.empty()) {
    throw Error(ErrorCode::kUnsupportedFormat, "no converter configured");
  }
  RunResult result;
  {
    std::lock_guard lock(command_mutex(converter_command));
    result = run_shell(converter_command, bytes);
  }
  if (result.exit_code != 0) {
    throw Error(ErrorCode::kConversionFailed,
                "converter exited with status " + std::to_string(result.exit_code) +
                    (result.err.empty() ? std::string() : ": " + result.err));
  }
  if (result.out.find_first_not_of(" \t\r\n") == std::string::npos ||
      result.out.find('\0') != std::string::npos ||
      !unicode::is_valid_utf8(result.out)) {
    throw Error(ErrorCode::kConversionFailed,
                "converter produced no usable HTML" +
                    (result.err.empty() ? std::string() : ": " + result.err));
  }
  Document doc = parse_html(result.out, std::move(name));
  return doc;
}

}  // namespace reuse
