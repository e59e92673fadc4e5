#pragma once

namespace storyweave {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kUserAgent = "storyweave/0.1.0";

} // namespace storyweave
