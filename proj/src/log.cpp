#include "usv/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace usv::log {

namespace {
std::atomic<bool> g_quiet{false};
std::mutex g_mutex;
}  // namespace

void set_quiet(bool quiet) { g_quiet = quiet; }
bool quiet() { return g_quiet; }

void warn(const std::string& msg) {
  if (g_quiet) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "[warn] " << msg << "\n";
}

void info(const std::string& msg) {
  if (g_quiet) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "[info] " << msg << "\n";
}

}  // namespace usv::log
