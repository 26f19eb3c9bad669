#pragma once

// Thin harness for driving the installed CLI binary from tests. The binary
// path and data directory arrive via environment variables set by CTest.

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cli {

struct Result {
  int code = -1;
  std::string out;
};

inline std::string binary() {
  const char* p = std::getenv("TOPC_CLI_BIN");
  if (!p) throw std::runtime_error("TOPC_CLI_BIN not set");
  return p;
}

inline std::string data_dir() {
  const char* p = std::getenv("TOPC_DATA_DIR");
  if (!p) throw std::runtime_error("TOPC_DATA_DIR not set");
  return p;
}

inline Result run(const std::string& args) {
  const std::string cmd = binary() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed: " + cmd);
  Result r;
  std::array<char, 4096> buf{};
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::filesystem::path scratch_dir() {
  auto d = std::filesystem::temp_directory_path() /
           ("topc_tests_" + std::to_string(getpid()));
  std::filesystem::create_directories(d);
  return d;
}

inline std::string write_file(const std::filesystem::path& path,
                              const std::string& body) {
  std::ofstream f(path);
  f << body;
  f.close();
  return path.string();
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace cli
