#pragma once

namespace uglt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace uglt
