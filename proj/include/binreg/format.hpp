#pragma once

#include <string>

namespace binreg {

// Locale-independent number formatting ('.' decimal separator always).

/// Shortest representation that round-trips.
std::string format_shortest(double v);
/// 17 significant digits.
std::string format_precise(double v);
/// Fixed notation with the given number of decimals.
std::string format_fixed(double v, int decimals);

}  // namespace binreg
