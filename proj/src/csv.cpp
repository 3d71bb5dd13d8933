#include "tunnelion/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "tunnelion/errors.hpp"

namespace tunnelion {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw Error("format_double failed");
    return std::string(buf.data(), ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::initializer_list<std::string_view> header)
    : out_(path), columns_(header.size()) {
    if (!out_) throw Error("cannot write " + path.string());
    bool first = true;
    for (auto h : header) {
        if (!first) out_ << ',';
        out_ << h;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<Cell> cells) {
    if (cells.size() != columns_) throw Error("csv row width does not match header");
    bool first = true;
    for (const auto& c : cells) {
        if (!first) out_ << ',';
        first = false;
        if (const auto* d = std::get_if<double>(&c)) {
            out_ << format_double(*d);
        } else if (const auto* s = std::get_if<std::string_view>(&c)) {
            out_ << *s;
        } else {
            out_ << std::get<long long>(c);
        }
    }
    out_ << '\n';
}

}  // namespace tunnelion
