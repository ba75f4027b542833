#pragma once

#include <map>
#include <string>
#include <string_view>

namespace necorr {

/// Replaces every "{name}" placeholder with its value. Unknown placeholders
/// are left untouched so template drift is visible in output rather than
/// silently dropped.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& values);

}  // namespace necorr
