#pragma once

namespace sortline {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sortline
