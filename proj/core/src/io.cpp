#include "markup/io.hpp"

#include <cmath>
#include <cstdio>

namespace markup {

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) {
            os << ',';
        }
        const auto& f = fields[i];
        if (f.find_first_of(",\"\n") != std::string::npos) {
            os << '"';
            for (char c : f) {
                if (c == '"') {
                    os << '"';
                }
                os << c;
            }
            os << '"';
        } else {
            os << f;
        }
    }
    os << '\n';
}

void write_csv_row(std::ostream& os, const std::vector<double>& fields) {
    std::vector<std::string> text;
    text.reserve(fields.size());
    for (double x : fields) {
        text.push_back(format_double(x));
    }
    write_csv_row(os, text);
}

}  // namespace markup
