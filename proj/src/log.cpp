#include "wsd/log.hpp"

#include <iostream>

namespace wsd {

namespace {
std::string g_prefix;
}

void set_log_prefix(const std::string& prefix) { g_prefix = prefix; }

void log_info(const std::string& msg) {
    std::cerr << g_prefix << "[info] " << msg << "\n";
}

void log_warn(const std::string& msg) {
    std::cerr << g_prefix << "[warn] " << msg << "\n";
}

}  // namespace wsd
