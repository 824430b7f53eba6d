#pragma once

namespace tlslayer {
inline constexpr const char* kToolVersion = "0.1.0";
}
