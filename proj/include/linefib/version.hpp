#pragma once

namespace linefib {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace linefib
