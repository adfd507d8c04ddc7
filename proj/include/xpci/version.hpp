#pragma once

namespace xpci {
inline constexpr const char* kVersion = "0.1.0";
}
