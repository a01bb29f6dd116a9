#include "fogalloc/logging.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <mutex>

namespace fogalloc {

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> log;
  std::call_once(once, [] {
    log = spdlog::stderr_color_mt("fogalloc");
    log->set_pattern("[%H:%M:%S.%e] [%l] %v");
    log->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("FOGALLOC_LOG")) {
      const auto level = spdlog::level::from_str(env);
      // from_str maps unknown names to off; only honour it when asked for.
      if (level != spdlog::level::off || std::string_view(env) == "off") log->set_level(level);
    }
  });
  return log;
}

}  // namespace

void init_logging() { logger(); }

void log_debug(std::string_view msg) { logger()->debug("{}", msg); }
void log_info(std::string_view msg) { logger()->info("{}", msg); }
void log_warn(std::string_view msg) { logger()->warn("{}", msg); }

}  // namespace fogalloc
