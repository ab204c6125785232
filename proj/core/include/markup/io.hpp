#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace markup {

/// Shortest round-trip-safe text for a double (17 significant digits).
std::string format_double(double x);

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);
void write_csv_row(std::ostream& os, const std::vector<double>& fields);

}  // namespace markup
