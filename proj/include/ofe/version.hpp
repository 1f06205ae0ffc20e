#pragma once

namespace ofe {

inline constexpr const char* version = "0.1.0";

} // namespace ofe
