#pragma once

namespace aaamdp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace aaamdp
