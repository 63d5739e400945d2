#pragma once

#include <string_view>

namespace sfc {

enum class LogLevel { off = 0, warn = 1, info = 2, debug = 3 };

/// Threshold is read once from SFC_SYM_LOG (off|warn|info|debug); default off.
LogLevel log_level();
void set_log_level(LogLevel level);

void log(LogLevel level, std::string_view message);

} // namespace sfc
