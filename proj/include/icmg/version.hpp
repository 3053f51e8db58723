#pragma once

namespace icmg {

inline constexpr const char* version = "0.1.0";

}
