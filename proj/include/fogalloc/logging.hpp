#pragma once

#include <string_view>

namespace fogalloc {

/// Reads FOGALLOC_LOG (trace, debug, info, warn, error, off; default warn).
/// Log lines go to stderr so that stdout stays machine-readable. Safe to call
/// more than once.
void init_logging();

void log_debug(std::string_view msg);
void log_info(std::string_view msg);
void log_warn(std::string_view msg);

}  // namespace fogalloc
