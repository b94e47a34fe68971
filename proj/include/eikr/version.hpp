#pragma once

namespace eikr {

inline constexpr char kVersion[] = "0.1.0";

}  // namespace eikr
