#pragma once

namespace impedukt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace impedukt
