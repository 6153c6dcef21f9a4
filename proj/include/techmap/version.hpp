#pragma once

namespace techmap {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace techmap
