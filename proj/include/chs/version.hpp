#pragma once

namespace chs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace chs
