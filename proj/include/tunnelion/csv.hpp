#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tunnelion {

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

class CsvWriter {
public:
    using Cell = std::variant<double, std::string_view, long long>;

    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

    void row(std::initializer_list<Cell> cells);
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    std::size_t columns_;
};

}  // namespace tunnelion
