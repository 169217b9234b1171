#pragma once

namespace psiwin {
inline constexpr const char* kVersion = "0.1.0";
}
