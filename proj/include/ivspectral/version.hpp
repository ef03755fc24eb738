#pragma once

namespace ivspectral {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ivspectral
