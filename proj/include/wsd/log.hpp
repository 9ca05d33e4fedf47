#pragma once

#include <string>

namespace wsd {

// Minimal stderr logger. The CLI sets a run id prefix once at startup.
void set_log_prefix(const std::string& prefix);
void log_info(const std::string& msg);
void log_warn(const std::string& msg);

}  // namespace wsd
