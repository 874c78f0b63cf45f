#include "polariton/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

#include "polariton/errors.hpp"

namespace polariton::csv {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text, const std::string& where) {
    const std::string_view t = trim(text);
    double v = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    if (!t.empty() && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << where << ": expected a finite number, got '" << t << "'";
        throw ValidationError(msg.str());
    }
    return v;
}

std::optional<double> parse_optional_double(std::string_view text, const std::string& where) {
    if (trim(text).empty()) {
        return std::nullopt;
    }
    return parse_double(text, where);
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string format_significant(double v, int digits) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, digits);
    return std::string(buf, ptr);
}

bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!trim(line).empty()) {
            return true;
        }
    }
    return false;
}

void expect_header(std::istream& in, const std::vector<std::string>& expected, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    if (!next_line(in, line, line_no)) {
        throw ValidationError(source + ": empty file, header row required");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }
    const auto cells = split(line);
    bool ok = cells.size() == expected.size();
    for (std::size_t i = 0; ok && i < cells.size(); ++i) {
        ok = trim(cells[i]) == expected[i];
    }
    if (!ok) {
        std::ostringstream msg;
        msg << source << ": header must be '";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            msg << (i ? "," : "") << expected[i];
        }
        msg << "', got '" << line << "'";
        throw ValidationError(msg.str());
    }
}

}  // namespace polariton::csv
