#pragma once

namespace decgame {
inline constexpr const char* kVersion = "0.1.0";
}
