#pragma once

#include <string_view>

namespace memheat::log {

enum class Level { Error = 0, Info = 1, Debug = 2 };

/// Active level, read once from MEMHEAT_LOG (error, info, debug); defaults to error.
Level level();
void set_level(Level level);
/// Parses a level name; returns false for an unknown name.
bool parse_level(std::string_view name, Level& out);

void write(Level level, std::string_view message);
inline void error(std::string_view m) { write(Level::Error, m); }
inline void info(std::string_view m) { write(Level::Info, m); }
inline void debug(std::string_view m) { write(Level::Debug, m); }

}  // namespace memheat::log
