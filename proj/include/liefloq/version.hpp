#pragma once

namespace liefloq {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace liefloq
