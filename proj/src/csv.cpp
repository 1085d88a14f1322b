#include "fairjudge/csv.hpp"

#include <array>
#include <charconv>
#include <system_error>

#include "fairjudge/error.hpp"

namespace fairjudge::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::string location(std::size_t line_no) {
    return "line " + std::to_string(line_no);
}

} // namespace

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view field, std::size_t line_no, std::string_view what) {
    double value = 0.0;
    if (!field.empty() && field.front() == '+')
        field.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
        throw DataError(location(line_no) + ": cannot parse " + std::string(what) + " '" +
                        std::string(field) + "'");
    return value;
}

std::int64_t parse_int(std::string_view field, std::size_t line_no, std::string_view what) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
        throw DataError(location(line_no) + ": cannot parse " + std::string(what) + " '" +
                        std::string(field) + "'");
    return value;
}

std::string format(double value) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    (void)ec;
    return std::string(buf.data(), ptr);
}

Reader::Reader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_)
        throw DataError("cannot open " + path.string());
    while (std::getline(in_, line_)) {
        ++line_no_;
        if (trim(line_).empty())
            continue;
        for (auto f : split(line_))
            header_.emplace_back(f);
        return;
    }
    throw DataError(path.string() + ": missing header");
}

std::size_t Reader::column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name)
            return i;
    throw DataError(path_.string() + ": missing column '" + std::string(name) + "'");
}

bool Reader::next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
        ++line_no_;
        if (trim(line_).empty())
            continue;
        fields = split(line_);
        if (fields.size() != header_.size())
            throw DataError(path_.string() + ": " + location(line_no_) + ": expected " +
                            std::to_string(header_.size()) + " fields, got " +
                            std::to_string(fields.size()));
        return true;
    }
    return false;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path.string());
    return out;
}

} // namespace fairjudge::csv
