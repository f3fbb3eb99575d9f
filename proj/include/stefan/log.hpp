/// @file log.hpp
/// Minimal warning sink. Warnings go to stderr unless silenced.
#pragma once

#include <functional>
#include <string>

namespace stefan::log {

using Sink = std::function<void(const std::string&)>;

void set_sink(Sink sink);
void set_quiet(bool quiet);
void warn(const std::string& message);
/// Emits `message` only the first time `key` is seen in this process.
void warn_once(const std::string& key, const std::string& message);
void info(const std::string& message);

}  // namespace stefan::log
