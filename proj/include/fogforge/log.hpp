#pragma once

namespace fogforge {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Threshold parsed once from FOGFORGE_LOG (error|warn|info|debug), default warn.
LogLevel log_level();

bool log_enabled(LogLevel level);

// printf-style, written to stderr with a level prefix.
void logf(LogLevel level, const char* fmt, ...) __attribute__((format(printf, 2, 3)));

}  // namespace fogforge
