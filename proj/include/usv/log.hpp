#pragma once

#include <string>

namespace usv::log {

// Diagnostics go to stderr; --quiet suppresses them.
void set_quiet(bool quiet);
bool quiet();
void warn(const std::string& msg);
void info(const std::string& msg);

}  // namespace usv::log
