#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace quatkmp::cli {

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Level comes from QUATKMP_LOG={error|info|debug}; default error.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("QUATKMP_LOG");
    if (env == nullptr) return LogLevel::error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    return LogLevel::error;
  }();
  return level;
}

inline void log_info(const std::string& message) {
  if (log_level() >= LogLevel::info) {
    std::fprintf(stderr, "[info] %s\n", message.c_str());
  }
}

inline void log_debug(const std::string& message) {
  if (log_level() >= LogLevel::debug) {
    std::fprintf(stderr, "[debug] %s\n", message.c_str());
  }
}

inline void log_error(const std::string& message) {
  std::fprintf(stderr, "[error] %s\n", message.c_str());
}

}  // namespace quatkmp::cli
