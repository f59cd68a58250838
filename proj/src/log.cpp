#include "memheat/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <string>

namespace memheat::log {
namespace {

Level from_env() {
  Level l = Level::Error;
  if (const char* env = std::getenv("MEMHEAT_LOG")) parse_level(env, l);
  return l;
}

std::atomic<int>& active() {
  static std::atomic<int> value{static_cast<int>(from_env())};
  return value;
}

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

bool parse_level(std::string_view name, Level& out) {
  if (name == "error") {
    out = Level::Error;
  } else if (name == "info") {
    out = Level::Info;
  } else if (name == "debug") {
    out = Level::Debug;
  } else {
    return false;
  }
  return true;
}

Level level() { return static_cast<Level>(active().load()); }

void set_level(Level l) { active().store(static_cast<int>(l)); }

void write(Level l, std::string_view message) {
  if (static_cast<int>(l) > active().load()) return;
  static constexpr const char* names[] = {"error", "info", "debug"};
  std::lock_guard lock(sink_mutex());
  std::fprintf(stderr, "memheat %s: %.*s\n", names[static_cast<int>(l)],
               static_cast<int>(message.size()), message.data());
}

}  // namespace memheat::log
