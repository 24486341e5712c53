#include "log.hpp"

#include <iostream>
#include <mutex>

namespace gestid {

namespace {

std::mutex sink_mutex;

WarningSink& sink() {
  static WarningSink s = [](const std::string& m) { std::cerr << "gestid: warning: " << m << '\n'; };
  return s;
}

}  // namespace

void set_warning_sink(WarningSink s) {
  std::lock_guard lock(sink_mutex);
  sink() = std::move(s);
}

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex);
  if (sink()) sink()(message);
}

}  // namespace gestid
