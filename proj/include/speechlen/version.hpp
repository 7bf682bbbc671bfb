#pragma once

namespace speechlen {

// Recorded in every run manifest so outputs can be traced to a build.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace speechlen
