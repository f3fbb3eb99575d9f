#include "stefan/log.hpp"

#include <iostream>
#include <mutex>
#include <set>

namespace stefan::log {
namespace {

std::mutex g_mutex;
Sink g_sink;
bool g_quiet = false;
std::set<std::string> g_seen;

void emit(const std::string& prefix, const std::string& message) {
  if (g_quiet) return;
  if (g_sink) {
    g_sink(prefix + message);
  } else {
    std::cerr << prefix << message << '\n';
  }
}

}  // namespace

void set_sink(Sink sink) {
  std::lock_guard lock(g_mutex);
  g_sink = std::move(sink);
}

void set_quiet(bool quiet) {
  std::lock_guard lock(g_mutex);
  g_quiet = quiet;
}

void warn(const std::string& message) {
  std::lock_guard lock(g_mutex);
  emit("warning: ", message);
}

void warn_once(const std::string& key, const std::string& message) {
  std::lock_guard lock(g_mutex);
  if (!g_seen.insert(key).second) return;
  emit("warning: ", message);
}

void info(const std::string& message) {
  std::lock_guard lock(g_mutex);
  emit("", message);
}

}  // namespace stefan::log
