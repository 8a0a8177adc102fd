#pragma once

namespace hambubble {

inline constexpr const char* kVersion = "0.1.0";
/// Bumped whenever the bubble file layout changes; older files are treated as stale.
inline constexpr int kBubbleFormat = 1;

}  // namespace hambubble
