#pragma once

namespace impactflow {

inline constexpr const char* kToolName = "impactflow";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace impactflow
