#pragma once

namespace hoyer {
inline constexpr const char* kVersion = "0.1.0";
}
