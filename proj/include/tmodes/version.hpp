#pragma once

namespace tmodes {

inline constexpr const char* kVersion = "0.1.0";

} // namespace tmodes
