#pragma once

namespace mango {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mango
