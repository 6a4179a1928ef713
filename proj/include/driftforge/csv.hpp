#pragma once

#include <string>

#include <fmt/format.h>

namespace driftforge::csv {

// Reals are written with 17 significant digits so that every double
// round-trips exactly.
inline std::string real(double x) { return fmt::format("{:.17g}", x); }

}  // namespace driftforge::csv
