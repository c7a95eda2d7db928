#pragma once

namespace dualgp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dualgp
