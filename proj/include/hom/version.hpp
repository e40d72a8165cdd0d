#pragma once

#define HOM_VERSION_MAJOR 1
#define HOM_VERSION_MINOR 0
#define HOM_VERSION_PATCH 0

namespace hom {

inline constexpr const char* version = "1.0.0";

}  // namespace hom
