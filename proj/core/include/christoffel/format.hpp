#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "christoffel/dataset.hpp"

namespace christoffel {

/// Shortest decimal text that parses back to exactly `value` (at most 17
/// significant digits). Non-finite values print as "inf", "-inf" or "nan".
std::string format_double(double value);

/// One header line, then one line per sample, comma separated.
void write_csv(std::ostream& out, std::span<const std::string> header, const Dataset& data);

/// Splits "a,b,c" on commas (no quoting).
std::vector<std::string> split(const std::string& text, char separator);

}  // namespace christoffel
