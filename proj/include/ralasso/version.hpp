#pragma once

namespace ralasso {
inline constexpr const char* kVersion = "0.1.0";
}
