#pragma once

namespace tsecon {

inline constexpr const char* kEngineName = "tsecon";
inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace tsecon
