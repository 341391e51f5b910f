#pragma once

namespace susyqm {

inline constexpr const char* VERSION = "1.0.0";

}  // namespace susyqm
