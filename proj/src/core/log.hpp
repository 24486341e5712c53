#pragma once

#include <functional>
#include <string>

namespace gestid {

using WarningSink = std::function<void(const std::string&)>;

// Replaces the process-wide warning sink. An empty sink silences warnings.
// The default sink writes "gestid: warning: ..." lines to stderr.
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace gestid
