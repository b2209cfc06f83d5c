#pragma once

namespace dofc {
inline constexpr const char* kVersion = "0.1.0";
}
