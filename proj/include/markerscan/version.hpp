#pragma once

namespace markerscan {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace markerscan
