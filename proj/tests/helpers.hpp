#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "readmit/cli.hpp"

namespace testutil {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;

  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("readmit_test_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"readmit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return readmit::cli::run(static_cast<int>(argv.size()), argv.data());
}

// Captures std::cerr for the lifetime of the object.
struct CaptureStderr {
  std::stringstream stream;
  std::streambuf* old;
  CaptureStderr() : old(std::cerr.rdbuf(stream.rdbuf())) {}
  ~CaptureStderr() { std::cerr.rdbuf(old); }
  std::string text() const { return stream.str(); }
};

}  // namespace testutil
