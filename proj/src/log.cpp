#include "spinchain/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <mutex>

namespace spinchain {

namespace {

std::mutex g_mutex;
LogLevel g_level = [] {
  const char* env = std::getenv("SPINCHAIN_LOG");
  if (!env) return LogLevel::Info;
  const std::string v(env);
  if (v == "quiet") return LogLevel::Quiet;
  if (v == "warn") return LogLevel::Warn;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}();

void emit(const char* tag, const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

}  // namespace

LogLevel log_level() { return g_level; }
void set_log_level(LogLevel level) { g_level = level; }

void log_warn(const std::string& msg) {
  if (g_level >= LogLevel::Warn) emit("warn", msg);
}
void log_info(const std::string& msg) {
  if (g_level >= LogLevel::Info) emit("info", msg);
}
void log_debug(const std::string& msg) {
  if (g_level >= LogLevel::Debug) emit("debug", msg);
}

}  // namespace spinchain
