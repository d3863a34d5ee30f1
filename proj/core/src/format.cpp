#include "christoffel/format.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "christoffel/error.hpp"

namespace christoffel {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

void write_csv(std::ostream& out, std::span<const std::string> header, const Dataset& data) {
    if (header.size() != static_cast<std::size_t>(data.dim())) {
        throw ArgumentError("write_csv: header has " + std::to_string(header.size()) + " columns, data has " +
                            std::to_string(data.dim()));
    }
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const auto row = data.point(i);
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_double(row[j]);
        out << '\n';
    }
}

std::vector<std::string> split(const std::string& text, char separator) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, separator)) parts.push_back(part);
    if (!text.empty() && text.back() == separator) parts.emplace_back();
    return parts;
}

}  // namespace christoffel
