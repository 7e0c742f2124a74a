#pragma once

#include <string_view>

namespace hyperlab {

/// Writes "[hyperlab] warning: ..." to stderr unless warnings are silenced.
void log_warning(std::string_view message);
/// Process-wide switch, e.g. for tests that provoke borderline cases on purpose.
void set_warnings_enabled(bool enabled);

}  // namespace hyperlab
