#ifndef SPINCHAIN_LOG_HPP
#define SPINCHAIN_LOG_HPP

#include <string>

namespace spinchain {

enum class LogLevel { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

/// Level comes from the SPINCHAIN_LOG environment variable
/// (quiet|warn|info|debug), default info.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace spinchain

#endif
