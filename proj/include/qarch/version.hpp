#pragma once

namespace qarch {
inline constexpr const char* kVersion = "0.1.0";
}
