#pragma once

namespace ewgeom {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ewgeom
