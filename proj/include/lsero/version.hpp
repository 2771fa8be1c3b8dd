#pragma once

namespace lsero {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lsero
