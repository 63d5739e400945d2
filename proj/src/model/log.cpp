#include "sfc/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace sfc {

namespace {

LogLevel from_env()
{
    const char* env = std::getenv("SFC_SYM_LOG");
    if (!env) return LogLevel::off;
    std::string v = env;
    if (v == "warn") return LogLevel::warn;
    if (v == "info") return LogLevel::info;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::off;
}

std::atomic<LogLevel>& threshold()
{
    static std::atomic<LogLevel> level{from_env()};
    return level;
}

std::mutex g_log_mutex;

} // namespace

LogLevel log_level() { return threshold().load(std::memory_order_relaxed); }

void set_log_level(LogLevel level) { threshold().store(level, std::memory_order_relaxed); }

void log(LogLevel level, std::string_view message)
{
    if (level == LogLevel::off || static_cast<int>(level) > static_cast<int>(log_level())) return;
    static constexpr const char* names[] = {"", "warn", "info", "debug"};
    std::lock_guard lock(g_log_mutex);
    std::clog << "[sfc-sym " << names[static_cast<int>(level)] << "] " << message << '\n';
}

} // namespace sfc
