#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace phi::testing {

struct CliResult {
  int exit = -1;
  std::string out;
  std::string err;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the phi binary with shell-quoted arguments.
inline CliResult run_cli(const std::string& args) {
  auto dir = std::filesystem::temp_directory_path();
  auto tag = std::to_string(::getpid()) + "-" + std::to_string(std::rand());
  auto out = dir / ("phi-out-" + tag), err = dir / ("phi-err-" + tag);
  std::string cmd = std::string("'") + PHI_BINARY + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  int status = std::system(cmd.c_str());
  CliResult r;
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  std::filesystem::remove(out);
  std::filesystem::remove(err);
  return r;
}

inline std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / (std::to_string(::getpid()) + "-" + name);
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

inline std::string corpus_program(const std::string& id) {
  return (std::filesystem::path(PHI_SOURCE_DIR) / "corpus" / id / "program.phi").string();
}

}  // namespace phi::testing
