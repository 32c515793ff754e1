#pragma once

namespace ranndy {

inline constexpr const char* version = "0.1.0";

} // namespace ranndy
