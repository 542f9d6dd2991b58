#ifndef NSD_LOG_HPP
#define NSD_LOG_HPP

#include <string>

namespace nsd {

// Stderr verbosity, controlled by the NSD_LOG environment variable
// (quiet | info | debug). Defaults to info.
enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace nsd

#endif  // NSD_LOG_HPP
