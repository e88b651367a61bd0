#pragma once

namespace c3vg {

inline constexpr const char* kEngineVersion = "0.1.0";

}
