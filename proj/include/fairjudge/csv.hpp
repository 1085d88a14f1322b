#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace fairjudge::csv {

// Splits one line on commas. No quoting: ids never contain commas.
std::vector<std::string_view> split(std::string_view line);

double parse_double(std::string_view field, std::size_t line_no, std::string_view what);
std::int64_t parse_int(std::string_view field, std::size_t line_no, std::string_view what);

// Shortest representation that parses back to the same double.
std::string format(double value);

// Line-oriented reader for headered CSV files. Blank lines are skipped,
// trailing '\r' is stripped. Line numbers are 1-based and count the header.
class Reader {
public:
    explicit Reader(const std::filesystem::path& path);

    const std::vector<std::string>& header() const { return header_; }

    // Column position of `name`; throws DataError naming the file if absent.
    std::size_t column(std::string_view name) const;

    // Reads the next data row; fields must match the header width.
    bool next(std::vector<std::string_view>& fields);

    std::size_t line_number() const { return line_no_; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::vector<std::string> header_;
    std::string line_;
    std::size_t line_no_ = 0;
};

std::ofstream open_output(const std::filesystem::path& path);

} // namespace fairjudge::csv
