#include "nsd/log.hpp"

#include <cstdlib>
#include <iostream>

namespace nsd {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("NSD_LOG");
    if (env == nullptr) return LogLevel::info;
    const std::string s(env);
    if (s == "quiet") return LogLevel::quiet;
    if (s == "debug") return LogLevel::debug;
    return LogLevel::info;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) std::cerr << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug) std::cerr << msg << "\n";
}

}  // namespace nsd
