#pragma once

namespace rabc {

constexpr const char* kVersion = "0.1.0";

}  // namespace rabc
