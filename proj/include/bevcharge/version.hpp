#pragma once

#ifndef BEVCHARGE_VERSION_STRING
#define BEVCHARGE_VERSION_STRING "0.1.0"
#endif

namespace bevcharge {
inline constexpr const char* kToolName = "bevcharge";
inline constexpr const char* kVersion = BEVCHARGE_VERSION_STRING;
}  // namespace bevcharge
