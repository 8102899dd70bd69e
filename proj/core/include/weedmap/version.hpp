#pragma once

namespace weedmap {

inline constexpr const char* kVersion = "0.1.0";

// Bumped whenever the on-disk model layout changes; loaders reject anything else.
inline constexpr int kModelFormatVersion = 1;

}  // namespace weedmap
