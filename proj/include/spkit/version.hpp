#pragma once

namespace spkit {
inline constexpr const char* kVersion = "0.1.0";
}
